#include "specest/partition_search.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace specest {

namespace {

Eigen::MatrixXd hankel_of_cluster(const MomentTable& table, int i, int order) {
  Eigen::MatrixXd m(order, order);
  for (int r = 0; r < order; ++r)
    for (int s = 0; s < order; ++s) m(r, s) = table.at(i, r + s);
  return m;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("estimate_partition: eigensolve failed");
  return solver.eigenvalues()(0);
}

bool positive_definite(const Eigen::MatrixXd& m, double threshold) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("estimate_partition: eigensolve failed");
  return solver.eigenvalues()(0) > threshold * m.trace();
}

}  // namespace

double g_hat(const MomentTable& table, const Partition& partition) {
  if (partition.parts() != static_cast<std::size_t>(table.clusters()))
    throw DomainError("g_hat: partition and moment table disagree on m");
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < table.clusters(); ++i) {
    int k_i = partition.orders[static_cast<std::size_t>(i)];
    worst = std::min(worst, min_eigenvalue(hankel_of_cluster(table, i, k_i)));
  }
  return worst;
}

PartitionSearchResult estimate_partition(const MomentTable& table, int k,
                                         bool prune, double pd_threshold) {
  int m = table.clusters();
  if (m < 1 || k < m)
    throw DomainError("estimate_partition: need k >= m >= 1");

  PartitionSearchResult result;

  // Largest positive-definite Hankel order per cluster. Order 1 is the count
  // fraction v_i/v, always positive.
  int cap = k - m + 1;
  result.pd_bounds.assign(static_cast<std::size_t>(m), 1);
  for (int i = 0; i < m; ++i) {
    int d = 1;
    while (d + 1 <= cap &&
           positive_definite(hankel_of_cluster(table, i, d + 1), pd_threshold))
      ++d;
    result.pd_bounds[static_cast<std::size_t>(i)] = d;
  }

  if (m == k) {
    // Fully split: the candidate set is a singleton.
    result.best = Partition(std::vector<int>(static_cast<std::size_t>(m), 1));
    result.g = g_hat(table, result.best);
    result.table.emplace_back(result.best, result.g);
    return result;
  }

  std::vector<Partition> candidates = enumerate_partitions(k, m);
  auto within_bounds = [&](const Partition& p) {
    for (int i = 0; i < m; ++i)
      if (p.orders[static_cast<std::size_t>(i)] >
          result.pd_bounds[static_cast<std::size_t>(i)])
        return false;
    return true;
  };

  std::vector<const Partition*> pool;
  if (prune) {
    for (const Partition& p : candidates)
      if (within_bounds(p)) pool.push_back(&p);
    if (pool.empty()) {
      result.pruning_fallback = true;
      for (const Partition& p : candidates) pool.push_back(&p);
    }
  } else {
    for (const Partition& p : candidates) pool.push_back(&p);
  }

  bool first = true;
  for (const Partition* p : pool) {
    double g = g_hat(table, *p);
    result.table.emplace_back(*p, g);
    // Strict improvement keeps the lexicographically smallest maximizer,
    // because enumeration is lexicographic.
    if (first || g > result.g) {
      result.best = *p;
      result.g = g;
      first = false;
    }
  }
  return result;
}

}  // namespace specest
