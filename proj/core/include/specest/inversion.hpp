#pragma once

#include <optional>
#include <vector>

#include "specest/psd.hpp"

namespace specest {

struct InversionDiagnostics {
  /// Spectral condition number of the (scale-normalized) Hankel system.
  double hankel_condition = 0.0;
  int newton_iterations = 0;
  double newton_residual = 0.0;
};

/// Recovers the k-atom measure with the given moments gamma_0..gamma_{2k-1}:
/// solves Hankel(G,k) c = -(gamma_k..gamma_{2k-1}), roots the monic
/// polynomial with those coefficients through a companion-matrix eigensolve,
/// then solves the Vandermonde system for the weights. Rejections carry the
/// stage (non-positive-definite Hankel, complex root, non-positive root or
/// weight) so callers can fall back to a coarser clustering.
DiscretePsd moments_to_measure(const MomentVector& moments, int k,
                               InversionDiagnostics* diag = nullptr);

/// Atoms for known weights: solves sum_i w_i a_i^l = gamma_l, l = 1..k by
/// damped Newton, seeded from the unconstrained inversion when the moments
/// allow it and from moment-matched spacing otherwise.
DiscretePsd solve_known_weights(const MomentVector& moments,
                                const std::vector<double>& weights, int k,
                                InversionDiagnostics* diag = nullptr);

/// Mixed case: `known[i]` fixes weight i, an empty slot leaves it free. All
/// atoms are free. Uses the lowest-order moment equations that make the
/// system square: sum_i w_i = gamma_0 (when any weight is free) plus
/// l = 1, 2, ... Damped Newton with an 8-start deterministic multistart.
DiscretePsd solve_partial_weights(const MomentVector& moments,
                                  const std::vector<std::optional<double>>& known,
                                  int k, InversionDiagnostics* diag = nullptr);

}  // namespace specest
