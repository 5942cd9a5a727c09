#pragma once

#include <complex>
#include <vector>

namespace specest {

/// Roots of c_0 + c_1 x + ... + c_n x^n via a balanced companion-matrix
/// eigensolve. Leading coefficients that vanish (relative to the largest
/// coefficient) are stripped first. Degree 0 yields no roots.
std::vector<std::complex<double>> polynomial_roots(
    const std::vector<std::complex<double>>& coeffs);

std::vector<std::complex<double>> polynomial_roots(
    const std::vector<double>& coeffs);

}  // namespace specest
