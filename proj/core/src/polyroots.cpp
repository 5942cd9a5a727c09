#include "specest/polyroots.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "specest/errors.hpp"

namespace specest {

std::vector<std::complex<double>> polynomial_roots(
    const std::vector<std::complex<double>>& coeffs) {
  using Complex = std::complex<double>;

  double biggest = 0.0;
  for (const Complex& c : coeffs) biggest = std::max(biggest, std::abs(c));
  if (biggest == 0.0) throw DomainError("polynomial_roots: zero polynomial");

  std::size_t degree = coeffs.size() - 1;
  while (degree > 0 && std::abs(coeffs[degree]) < 1e-14 * biggest) --degree;
  if (degree == 0) return {};

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  const Complex lead = coeffs[degree];
  for (std::size_t i = 0; i < degree; ++i) {
    companion(i, degree - 1) = -coeffs[i] / lead;
    if (i + 1 < degree) companion(i + 1, i) = 1.0;
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("polynomial_roots: companion eigensolve failed");

  std::vector<Complex> roots(degree);
  for (std::size_t i = 0; i < degree; ++i) roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
  return roots;
}

std::vector<std::complex<double>> polynomial_roots(
    const std::vector<double>& coeffs) {
  std::vector<std::complex<double>> c(coeffs.begin(), coeffs.end());
  return polynomial_roots(c);
}

}  // namespace specest
