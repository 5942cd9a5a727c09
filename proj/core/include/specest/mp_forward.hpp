#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "specest/psd.hpp"

namespace specest {

/// One compact interval [lower, upper] of the limiting spectral support,
/// together with the critical points on the real s-line that produced its
/// edges (kept for diagnostics and edge verification).
struct SupportInterval {
  double lower = 0.0;
  double upper = 0.0;
  double s_lower = 0.0;  // critical point with z(s_lower) == lower
  double s_upper = 0.0;  // critical point with z(s_upper) == upper
};

/// The support of the limiting spectral distribution for (H, c): ordered
/// disjoint intervals plus per-interval contour abscissas delta_i^- < x_i^-
/// and x_i^+ < delta_i^+ forming a strictly interleaving chain.
struct SupportSet {
  std::vector<SupportInterval> intervals;
  std::vector<std::pair<double, double>> contour_bounds;
  double ratio_c = 0.0;
  /// Set when intervals separated by less than 1e-6 * scale were merged.
  bool merged_near_degenerate = false;

  std::size_t count() const noexcept { return intervals.size(); }
};

/// Division of a population measure into per-interval sub-measures H_i with
/// the u-image brackets [u(delta_i^-), u(delta_i^+)] that defined them.
struct PsdDivision {
  std::vector<DiscretePsd> parts;
  std::vector<std::pair<double, double>> u_bounds;
};

/// z(s) = -1/s + c * sum_j w_j a_j / (1 + a_j s): the inverse of the
/// companion Stieltjes transform. Throws DomainError at the poles s = 0 and
/// s = -1/a_j.
std::complex<double> companion_z(std::complex<double> s, const DiscretePsd& H,
                                 double c);

/// The companion Stieltjes transform of the limiting distribution for a
/// model (H, c): bundles the map z(s), the inverse branch s_bar(z), the
/// plain transform s(z), and the u-curve over one immutable model.
class CompanionTransform {
 public:
  CompanionTransform(DiscretePsd H, double c);

  const DiscretePsd& model() const noexcept { return model_; }
  double ratio() const noexcept { return c_; }

  std::complex<double> z(std::complex<double> s) const;
  std::complex<double> z_derivative(std::complex<double> s) const;
  /// Companion transform value: Im(z) and Im(s_bar) share a sign; real z
  /// outside the support takes the real branch with z'(s) > 0.
  std::complex<double> s_bar(std::complex<double> z) const;
  /// Plain transform, recovered by s = (s_bar + (1 - c)/z) / c.
  std::complex<double> s(std::complex<double> z) const;
  /// u(x) = -1/s_bar(x) for real x off the support.
  double u(double x) const;

 private:
  DiscretePsd model_;
  double c_;
};

/// z'(s) = 1/s^2 - c * sum_j w_j a_j^2 / (1 + a_j s)^2.
std::complex<double> companion_z_derivative(std::complex<double> s,
                                            const DiscretePsd& H, double c);

/// Solves z(s) = z for the companion Stieltjes transform value at z. For
/// complex z the root in the half-plane with Im(z) * Im(s) > 0 is returned;
/// for real z outside the support, the real root where z'(s) > 0. Implemented
/// by clearing denominators into a degree-(k+1) polynomial and selecting among
/// its roots, then polishing with Newton steps.
std::complex<double> solve_companion(std::complex<double> z,
                                     const DiscretePsd& H, double c);

/// Locates the support intervals of the limiting spectral distribution by
/// critical-point analysis of z(s) on each maximal interval of the real line
/// between the poles of z, and fills the contour bounds.
SupportSet support_intervals(const DiscretePsd& H, double c);

/// Density of the limiting spectral distribution at x > 0, via Stieltjes
/// inversion at x + i*1e-9.
double lsd_density(double x, const DiscretePsd& H, double c);

/// u(x) = -1/s(x) on the complement of the support; strictly increasing
/// there, with values in the complement of the population support.
double u_curve(double x, const DiscretePsd& H, double c);

/// Assigns each atom of H to the interval i whose bracket
/// [u(delta_i^-), u(delta_i^+)] contains it. The parts sum to H atomwise.
PsdDivision divide_psd(const DiscretePsd& H, const SupportSet& support);

}  // namespace specest
