#pragma once

#include "specest/esd.hpp"
#include "specest/mp_forward.hpp"
#include "specest/psd.hpp"

namespace specest {

/// Rectangle contour {re_min <= Re(z) <= re_max, |Im(z)| <= half_height},
/// traversed counter-clockwise. Half-height 1 matches the moment integrals'
/// contract; only the abscissas vary.
struct RectangleContour {
  double re_min = 0.0;
  double re_max = 0.0;
  double half_height = 1.0;
};

/// Quadrature reference for the residue-based sample moments:
///   (-1)^l (n/p) (1/2 pi i) * contour integral of z s_n'(z) / s_n^l(z).
/// Adaptive trapezoid refinement per edge to `tol` relative to the edge
/// magnitude; every pole (sample eigenvalue or zero of s_n) must stay at
/// least 1e-6 away from the contour. Test oracle only; the production path
/// is the residue sum.
double oracle_contour_moment(const EigenSample& sample,
                             const RectangleContour& contour, int l,
                             double tol = 1e-10);

/// Population-side counterpart:
///   (-1)^l (1/c) (1/2 pi i) * contour integral of z s'(z) / s^l(z)
/// with the companion transform s evaluated through the forward model.
double oracle_contour_moment(const DiscretePsd& H, double c,
                             const RectangleContour& contour, int l,
                             double tol = 1e-10);

}  // namespace specest
