#include "specest/contour_oracle.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace specest {

namespace {

using Complex = std::complex<double>;

constexpr double kPoleClearance = 1e-6;

Complex cpow_int(Complex base, int exponent) {
  Complex out{1.0, 0.0};
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

// Shortest distance from a real pole to the rectangle boundary.
double contour_distance(const RectangleContour& contour, double x) {
  if (x < contour.re_min) return contour.re_min - x;
  if (x > contour.re_max) return x - contour.re_max;
  return std::min({contour.half_height, x - contour.re_min, contour.re_max - x});
}

double interval_distance(double x, double lo, double hi) {
  return std::max({lo - x, x - hi, 0.0});
}

struct EdgeResult {
  Complex value{0.0, 0.0};
  bool converged = true;
};

// Adaptive trapezoid refinement with Richardson extrapolation along the
// straight segment [za, zb]: each segment compares the once-extrapolated
// whole against its halves, so acceptance converges at fourth order.
EdgeResult integrate_edge(const std::function<Complex(Complex)>& f, Complex za,
                          Complex zb, double tol) {
  auto refined = [](Complex a, Complex b, Complex fa, Complex fm, Complex fb) {
    Complex span = b - a;
    Complex coarse = 0.5 * span * (fa + fb);
    Complex fine = 0.25 * span * (fa + 2.0 * fm + fb);
    return fine + (fine - coarse) / 3.0;
  };

  struct Frame {
    Complex a, b, fa, fm, fb;
    Complex whole;
    double tol;
    int depth;
  };
  EdgeResult result;
  std::vector<Frame> stack;
  {
    Complex mid = 0.5 * (za + zb);
    Complex fa = f(za), fm = f(mid), fb = f(zb);
    Complex whole = refined(za, zb, fa, fm, fb);
    // Tolerance relative to the edge magnitude; an absolute target below the
    // rounding floor of a large integral can never be met.
    double scaled_tol = tol * (1.0 + std::abs(whole));
    stack.push_back({za, zb, fa, fm, fb, whole, scaled_tol, 0});
  }
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    Complex mid = 0.5 * (fr.a + fr.b);
    Complex lm = 0.5 * (fr.a + mid), rm = 0.5 * (mid + fr.b);
    Complex flm = f(lm), frm = f(rm);
    Complex left = refined(fr.a, mid, fr.fa, flm, fr.fm);
    Complex right = refined(mid, fr.b, fr.fm, frm, fr.fb);
    double err = std::abs(left + right - fr.whole);
    if (err <= 15.0 * fr.tol || fr.depth >= 40) {
      if (err > 15.0 * fr.tol) result.converged = false;
      result.value += left + right + (left + right - fr.whole) / 15.0;
    } else {
      stack.push_back({fr.a, mid, fr.fa, flm, fr.fm, left, 0.5 * fr.tol,
                       fr.depth + 1});
      stack.push_back({mid, fr.b, fr.fm, frm, fr.fb, right, 0.5 * fr.tol,
                       fr.depth + 1});
    }
  }
  return result;
}

double contour_moment(const std::function<Complex(Complex)>& integrand,
                      const RectangleContour& contour, double prefactor, int l,
                      double tol) {
  if (l < 1) throw DomainError("oracle_contour_moment: l must be >= 1");
  if (!(contour.re_max > contour.re_min) || !(contour.half_height > 0.0))
    throw DomainError("oracle_contour_moment: degenerate contour");

  double h = contour.half_height;
  Complex c1(contour.re_min, -h), c2(contour.re_max, -h);
  Complex c3(contour.re_max, h), c4(contour.re_min, h);
  std::array<std::pair<Complex, Complex>, 4> edges{
      std::pair{c1, c2}, std::pair{c2, c3}, std::pair{c3, c4},
      std::pair{c4, c1}};

  Complex total{0.0, 0.0};
  bool converged = true;
  for (const auto& [a, b] : edges) {
    EdgeResult edge = integrate_edge(integrand, a, b, tol);
    converged = converged && edge.converged;
    total += edge.value;
  }
  if (!converged)
    throw NumericalError("oracle_contour_moment: quadrature did not converge");

  Complex value = prefactor * total / Complex(0.0, 2.0 * M_PI);
  if (std::abs(value.imag()) > 1e-7 * (1.0 + std::abs(value.real())))
    throw NumericalError(
        "oracle_contour_moment: imaginary residue in a real integral");
  return value.real();
}

}  // namespace

double oracle_contour_moment(const EigenSample& sample,
                             const RectangleContour& contour, int l,
                             double tol) {
  for (double lambda : sample.lambdas())
    if (contour_distance(contour, lambda) < kPoleClearance)
      throw NumericalError("oracle_contour_moment: eigenvalue " +
                           std::to_string(lambda) +
                           " within 1e-6 of the contour");
  for (double mu : zeros_of_companion(sample))
    if (mu != 0.0 && contour_distance(contour, mu) < kPoleClearance)
      throw NumericalError("oracle_contour_moment: transform zero " +
                           std::to_string(mu) + " within 1e-6 of the contour");

  auto integrand = [&](Complex z) {
    Complex s = companion_stieltjes_n(z, sample, 0);
    Complex sp = companion_stieltjes_n(z, sample, 1);
    return z * sp / cpow_int(s, l);
  };
  double sign = (l % 2 == 0) ? 1.0 : -1.0;
  double prefactor = sign * static_cast<double>(sample.n()) / sample.p();
  return contour_moment(integrand, contour, prefactor, l, tol);
}

double oracle_contour_moment(const DiscretePsd& H, double c,
                             const RectangleContour& contour, int l,
                             double tol) {
  SupportSet support = support_intervals(H, c);
  for (const SupportInterval& interval : support.intervals) {
    // The cut [lower, upper] lies on the real axis, so only the vertical
    // edges can come close to it.
    for (double edge : {contour.re_min, contour.re_max})
      if (interval_distance(edge, interval.lower, interval.upper) <
          kPoleClearance)
        throw NumericalError(
            "oracle_contour_moment: contour edge within 1e-6 of the support");
  }

  auto integrand = [&](Complex z) {
    Complex s = solve_companion(z, H, c);
    // ds/dz = 1 / z'(s) along the inverse branch.
    Complex sp = 1.0 / companion_z_derivative(s, H, c);
    return z * sp / cpow_int(s, l);
  };
  double sign = (l % 2 == 0) ? 1.0 : -1.0;
  return contour_moment(integrand, contour, sign / c, l, tol);
}

}  // namespace specest
