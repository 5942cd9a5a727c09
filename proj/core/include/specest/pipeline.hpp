#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specest/esd.hpp"
#include "specest/inversion.hpp"
#include "specest/partition_search.hpp"
#include "specest/psd.hpp"
#include "specest/residues.hpp"

namespace specest {

/// Knobs for one estimation run. `k` (the total atom count) is required; the
/// clustering comes from `boundaries`, `cluster_sizes`, or plain `m`, in that
/// precedence. `merge_plan` groups contiguous clusters before estimation.
/// `known_weights` pins weights by global atom index (slot i = i-th atom of
/// the assembled estimate); empty means all weights are estimated.
struct EstimationConfig {
  int k = 0;
  int m = 1;
  std::vector<double> boundaries;
  std::vector<int> cluster_sizes;
  std::vector<std::vector<int>> merge_plan;
  /// Per-cluster orders (after any merge); empty = estimated from the data.
  std::vector<int> forced_orders;
  std::vector<std::optional<double>> known_weights;
  /// Merge the offending cluster with its nearest neighbour and retry when an
  /// inversion stage rejects; at most m-1 merges.
  bool allow_merge_fallback = true;
  /// Highest moment order the pipeline may request (covers 2k_i - 1 for
  /// per-cluster orders up to 8).
  int max_order_limit = 15;
  /// Positive-definiteness cut for the partition search, relative to trace.
  double pd_threshold = 1e-12;
};

struct Diagnostics {
  std::vector<std::string> events;
  std::vector<double> hankel_conditions;
  /// Partition estimated before any fallback merging.
  Partition initial_partition;
  int merges = 0;
  /// Single-cluster run: every moment of the full distribution is in play.
  bool full_moment_path = false;
  bool pruning_fallback = false;
  double wall_seconds = 0.0;
};

struct EstimationResult {
  DiscretePsd theta_hat;
  Partition partition;
  MomentTable moments;
  Diagnostics diagnostics;

  EstimationResult() : theta_hat({1.0}, {1.0}) {}
};

/// Local moment estimator: cluster, locate the transform zeros, estimate
/// per-cluster moments, estimate the partition (unless forced), invert each
/// part, and concatenate.
EstimationResult lme(const EigenSample& sample, const EstimationConfig& config);

/// Same pipeline over merged clusters; with everything merged into one
/// cluster this is the full-moment estimator.
EstimationResult glme(const EigenSample& sample, const EstimationConfig& config);

/// Dispatches to glme when a merge plan is present, lme otherwise.
EstimationResult estimate(const EigenSample& sample,
                          const EstimationConfig& config);

}  // namespace specest
