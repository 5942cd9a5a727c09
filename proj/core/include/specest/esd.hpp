#pragma once

#include <complex>
#include <string>
#include <vector>

#include "specest/errors.hpp"

namespace specest {

/// The sorted nonzero eigenvalues lambda_1 <= ... <= lambda_v of a sample
/// covariance matrix, with the dimensions (p, n) they came from; v = min(p, n).
class EigenSample {
 public:
  /// `lambdas` must hold exactly v = min(p, n) positive values (any order).
  EigenSample(std::vector<double> lambdas, int p, int n);

  /// Accepts either v values or all p eigenvalues of the covariance matrix;
  /// in the latter case the p - v smallest entries must be numerically zero
  /// (below 1e-8 of the largest) and are dropped.
  static EigenSample from_values(std::vector<double> values, int p, int n);

  /// One-column text/CSV file of eigenvalues.
  static EigenSample from_csv(const std::string& path, int p, int n);

  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  double lambda(std::size_t i) const { return lambdas_.at(i); }
  int p() const noexcept { return p_; }
  int n() const noexcept { return n_; }
  int v() const noexcept { return static_cast<int>(lambdas_.size()); }
  double ratio() const noexcept { return static_cast<double>(p_) / n_; }

 private:
  std::vector<double> lambdas_;
  int p_ = 0;
  int n_ = 0;
};

/// order-th derivative of the empirical companion Stieltjes transform,
///   s_n(z) = -(1 - p/n)/z + (1/n) sum_i 1/(lambda_i - z),
/// evaluated away from its poles {0} U {lambda_i}. Closed form for any order:
///   s_n^(j)(z) = -(1 - p/n)(-1)^j j!/z^{j+1} + (j!/n) sum_i (lambda_i - z)^{-(j+1)}.
/// Only the v nonzero eigenvalues enter; the zero eigenvalues of the p x p
/// matrix cancel against the (1 - p/n) term, leaving min(p, n) in its place.
std::complex<double> companion_stieltjes_n(std::complex<double> z,
                                           const EigenSample& sample,
                                           int order = 0);
double companion_stieltjes_n(double z, const EigenSample& sample, int order = 0);

/// The v real zeros mu_1 < lambda_1 < mu_2 < ... < mu_v < lambda_v of the
/// empirical companion transform. mu_1 is found in (0, lambda_1) when p < n
/// and is set to 0 when p >= n (the p = n convention; see the c > 1 note in
/// the project README). Numerically coincident eigenvalues are jittered by
/// 1e-12 relative before root finding; `log`, when given, records that event.
std::vector<double> zeros_of_companion(const EigenSample& sample,
                                       std::vector<std::string>* log = nullptr);

/// Contiguous clusters A_1, ..., A_m of the sample eigenvalues with the zero
/// sets B_i attached (B_i holds the mu's indexed by A_i, excluding a mu equal
/// to 0).
class ClusterAssignment {
 public:
  ClusterAssignment(const EigenSample& sample, std::vector<int> fences,
                    std::vector<double> zeros);

  int clusters() const noexcept { return static_cast<int>(fences_.size()) - 1; }
  /// Index range [first, last) of cluster i within the sorted eigenvalues.
  std::pair<int, int> range(int i) const;
  int count(int i) const;
  int total() const noexcept { return fences_.back(); }

  /// Eigenvalues of cluster i (the set A_i).
  std::vector<double> a_set(int i) const;
  /// Zeros attached to cluster i (the set B_i); zeros equal to 0 excluded.
  std::vector<double> b_set(int i) const;

  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  const std::vector<double>& zeros() const noexcept { return zeros_; }

  /// Splits at those entries (index fences) merged according to contiguous
  /// groups of cluster indices covering 0..m-1 in order.
  ClusterAssignment merged(const std::vector<std::vector<int>>& groups) const;
  /// Merges cluster i with cluster j = i+1 or i-1.
  ClusterAssignment merged_pair(int i, int j) const;

 private:
  std::vector<double> lambdas_;
  std::vector<double> zeros_;
  std::vector<int> fences_;  // m+1 entries: 0 = f_0 < f_1 < ... < f_m = v
};

/// Clusters by splitting at the m-1 largest consecutive eigenvalue gaps.
ClusterAssignment cluster_eigenvalues(const EigenSample& sample, int m);

/// Clusters by explicit boundary abscissas (each strictly between two
/// consecutive eigenvalues; a boundary matching an eigenvalue is an error).
ClusterAssignment cluster_eigenvalues(const EigenSample& sample,
                                      const std::vector<double>& boundaries);

/// Clusters by prescribed per-cluster counts summing to v.
ClusterAssignment cluster_by_sizes(const EigenSample& sample,
                                   const std::vector<int>& sizes);

}  // namespace specest
