#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specest/pipeline.hpp"
#include "specest/psd.hpp"

namespace specest {

struct DimensionPair {
  int p = 0;
  int n = 0;
};

/// One estimator variant of an experiment.
///  - lme: gap (or boundary) clustering, estimated partition;
///  - me: one cluster per atom sized by the known weights, all orders 1;
///  - glme: lme over merged clusters (merge groups are 0-based here);
///  - full: single cluster, every moment of the full distribution.
struct VariantSpec {
  enum class Kind { lme, me, glme, full };
  enum class WeightsMode { none, all, indices };

  std::string name;
  Kind kind = Kind::lme;
  WeightsMode weights = WeightsMode::none;
  std::vector<int> known_indices;  // 0-based atom slots, for WeightsMode::indices
  int m_override = 0;
  std::vector<std::vector<int>> merge_plan;
  std::vector<double> boundaries;
};

/// A Monte Carlo experiment: model, dimension ladder at fixed p/n,
/// replication count, seed, and the variants to run on each sample.
struct ExperimentSpec {
  DiscretePsd model;
  std::vector<DimensionPair> sizes;
  int replications = 100;
  std::uint64_t seed = 0;
  int k = 0;
  int m = 1;
  std::vector<VariantSpec> variants;

  ExperimentSpec() : model({1.0}, {1.0}) {}

  /// Common p/n across the dimension list (equal within 1e-12).
  double ratio() const;

  /// Key-value config file: atoms, weights (or model=<path>), sizes
  /// (e.g. `320x1000 160x500`), replications, seed, k, m, and one `variant`
  /// line per estimator.
  static ExperimentSpec from_file(const std::string& path);
  static ExperimentSpec parse(std::istream& in);
};

struct VariantStats {
  std::string name;
  int replications = 0;
  int failures = 0;
  std::vector<double> atom_mean, atom_sd;
  std::vector<double> weight_mean, weight_sd;
  double d_mean = 0.0, d_sd = 0.0;
  /// Initial partition estimate per replication, e.g. "(1,1,2)" -> 97.
  std::vector<std::pair<std::string, int>> partition_freq;
  double seconds_per_rep = 0.0;  // reported separately; not serialized
};

struct SizeReport {
  DimensionPair size;
  std::vector<VariantStats> variants;
};

struct ExperimentReport {
  std::string model_record;
  double ratio = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
  std::vector<SizeReport> sizes;

  /// Deterministic CSV: one row per variant/parameter, full precision.
  std::string to_csv() const;
  /// Deterministic plain-text tables in the Mean / St.D. layout.
  std::string to_text() const;
  /// Wall-clock per replication (not byte-stable across runs).
  std::string timing_summary() const;
};

/// Sorted eigenvalues of a sample covariance matrix for a diagonal population
/// built from `theta` (atom multiplicities by largest-remainder rounding of
/// p * w_i) and an n-column standard Gaussian draw. Deterministic in `seed`.
EigenSample generate_eigen_sample(const DiscretePsd& theta, int p, int n,
                                  std::uint64_t seed);

/// L1 distance between the quantile functions of two unit-mass discrete
/// measures, evaluated exactly on the merged cumulative-weight breakpoints.
double wasserstein(const DiscretePsd& a, const DiscretePsd& b);

/// Runs the experiment; replications are distributed over `threads` workers
/// (0 = hardware concurrency) with per-replication sub-seeds, so parallel and
/// serial runs aggregate identically.
ExperimentReport run_experiment(const ExperimentSpec& spec, int threads = 0);

}  // namespace specest
