#pragma once

#include <utility>
#include <vector>

#include "specest/psd.hpp"
#include "specest/residues.hpp"

namespace specest {

/// g(k) = min_i lambda_min(Hankel(H_i, k_i)) over the parts, built from the
/// estimated moments; needs gamma_{i,0..2k_i-2} per cluster.
double g_hat(const MomentTable& table, const Partition& partition);

struct PartitionSearchResult {
  Partition best;
  double g = 0.0;
  /// Every evaluated candidate with its objective value.
  std::vector<std::pair<Partition, double>> table;
  /// Largest positive-definite Hankel order per cluster (the pruning bound).
  std::vector<int> pd_bounds;
  /// Set when pruning emptied the candidate set and the full enumeration ran.
  bool pruning_fallback = false;
};

/// Maximizes g over the compositions of k into one part per cluster.
/// Candidates are pruned to k_i <= d_i where d_i is the largest order with a
/// positive-definite estimated Hankel matrix (eigenvalues above
/// pd_threshold * trace); ties break to the lexicographically smallest
/// candidate.
PartitionSearchResult estimate_partition(const MomentTable& table, int k,
                                         bool prune = true,
                                         double pd_threshold = 1e-12);

}  // namespace specest
