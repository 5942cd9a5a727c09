#pragma once

#include <vector>

#include "specest/esd.hpp"

namespace specest {

/// Per-cluster estimated moments: gamma[i][l] holds the order-l moment of the
/// i-th part, with gamma[i][0] = v_i / v taken from the cluster counts.
struct MomentTable {
  enum class Source { residues, oracle };

  std::vector<std::vector<double>> gamma;
  std::vector<Source> source;

  int clusters() const noexcept { return static_cast<int>(gamma.size()); }

  double at(int i, int l) const {
    if (i < 0 || i >= clusters())
      throw DomainError("MomentTable: cluster index out of range");
    const auto& row = gamma[static_cast<std::size_t>(i)];
    if (l < 0 || static_cast<std::size_t>(l) >= row.size())
      throw DomainError("MomentTable: missing moment of order " +
                        std::to_string(l) + " for cluster " + std::to_string(i));
    return row[static_cast<std::size_t>(l)];
  }

  int max_order(int i) const {
    return static_cast<int>(gamma.at(static_cast<std::size_t>(i)).size()) - 1;
  }
};

/// Residue of f_l(z) = z s_n'(z) / s_n^l(z) at a sample eigenvalue:
/// -lambda for l = 1, zero otherwise.
double residue_at_lambda(double lambda, int l);

/// Residue of f_l at a zero mu of the empirical companion transform (an
/// order-l pole). Closed forms up to l = 5; higher orders expand s_n around
/// mu from exact derivatives and read the Laurent coefficient off a truncated
/// series division.
double residue_at_mu(double mu, const EigenSample& sample, int l);

/// Same series route for any l >= 1; exposed so the closed forms can be
/// cross-checked against it.
double residue_at_mu_series(double mu, const EigenSample& sample, int l);

/// Moments gamma_{i,0..max_order} of the i-th part:
/// gamma_{i,0} = v_i/v and, for l >= 1,
/// gamma_{i,l} = (-1)^l (n/p) [ sum_{lambda in A_i} Res + sum_{mu in B_i} Res ].
std::vector<double> estimate_cluster_moments(const EigenSample& sample,
                                             const ClusterAssignment& assignment,
                                             int cluster, int max_order);

/// All clusters at a common maximal order.
MomentTable estimate_moment_table(const EigenSample& sample,
                                  const ClusterAssignment& assignment,
                                  int max_order);

}  // namespace specest
