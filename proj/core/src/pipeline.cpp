#include "specest/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace specest {

namespace {

ClusterAssignment initial_clustering(const EigenSample& sample,
                                     const EstimationConfig& config) {
  if (!config.boundaries.empty())
    return cluster_eigenvalues(sample, config.boundaries);
  if (!config.cluster_sizes.empty())
    return cluster_by_sizes(sample, config.cluster_sizes);
  return cluster_eigenvalues(sample, config.m);
}

int nearest_neighbour(const ClusterAssignment& assignment, int i) {
  const std::vector<double>& lambdas = assignment.lambdas();
  double left = std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  if (i > 0) {
    auto [first, last] = assignment.range(i - 1);
    left = lambdas[static_cast<std::size_t>(assignment.range(i).first)] -
           lambdas[static_cast<std::size_t>(last) - 1];
    (void)first;
  }
  if (i + 1 < assignment.clusters()) {
    auto [first, last] = assignment.range(i);
    right = lambdas[static_cast<std::size_t>(assignment.range(i + 1).first)] -
            lambdas[static_cast<std::size_t>(last) - 1];
    (void)first;
  }
  return left <= right ? i - 1 : i + 1;
}

void validate_config(const EigenSample& sample, const EstimationConfig& config) {
  if (config.k < 1)
    throw DomainError(
        "estimate: the total atom count k must be given; estimating the "
        "order itself is out of scope (use an order-selection method first)");
  if (!config.known_weights.empty() &&
      static_cast<int>(config.known_weights.size()) != config.k)
    throw DomainError("estimate: known_weights must have one slot per atom");
  for (const auto& w : config.known_weights)
    if (w && !(*w > 0.0))
      throw DomainError("estimate: known weights must be positive");
  if (config.boundaries.empty() && config.cluster_sizes.empty() &&
      (config.m < 1 || config.m > sample.v()))
    throw DomainError("estimate: need 1 <= m <= v");
}

EstimationResult run_pipeline(const EigenSample& sample,
                              const EstimationConfig& config,
                              bool apply_merge_plan) {
  auto t0 = std::chrono::steady_clock::now();
  validate_config(sample, config);

  ClusterAssignment assignment = initial_clustering(sample, config);
  Diagnostics diag;

  {
    const std::vector<double>& lambdas = sample.lambdas();
    for (std::size_t i = 1; i < lambdas.size(); ++i)
      if (lambdas[i] - lambdas[i - 1] <= 1e-12 * lambdas[i]) {
        diag.events.push_back(
            "zero finding: repeated eigenvalues jittered by 1e-12 relative");
        break;
      }
  }

  std::vector<int> forced = config.forced_orders;
  if (apply_merge_plan && !config.merge_plan.empty()) {
    if (!forced.empty()) {
      if (forced.size() != static_cast<std::size_t>(assignment.clusters()))
        throw DomainError("glme: forced_orders must match the pre-merge clusters");
      std::vector<int> merged_orders;
      std::size_t next = 0;
      for (const auto& group : config.merge_plan) {
        int total = 0;
        for (std::size_t g = 0; g < group.size(); ++g) total += forced[next++];
        merged_orders.push_back(total);
      }
      forced = std::move(merged_orders);
    }
    std::ostringstream note;
    note << "glme: merged clusters into " << config.merge_plan.size()
         << " group(s)";
    diag.events.push_back(note.str());
    assignment = assignment.merged(config.merge_plan);
  }

  if (config.k < assignment.clusters())
    throw DomainError("estimate: k must be at least the cluster count");

  bool first_pass = true;
  while (true) {
    int m_cur = assignment.clusters();
    int cap = config.k - m_cur + 1;
    int max_order = 2 * cap - 1;
    if (max_order > config.max_order_limit)
      throw DomainError("estimate: needs moments up to order " +
                        std::to_string(max_order) + ", above the configured "
                        "limit of " + std::to_string(config.max_order_limit));
    MomentTable table = estimate_moment_table(sample, assignment, max_order);

    Partition partition;
    if (!forced.empty()) {
      if (forced.size() != static_cast<std::size_t>(m_cur))
        throw DomainError("estimate: forced_orders must have one entry per cluster");
      partition = Partition(forced);
      if (partition.total() != config.k)
        throw DomainError("estimate: forced_orders must sum to k");
    } else {
      PartitionSearchResult search =
          estimate_partition(table, config.k, true, config.pd_threshold);
      partition = search.best;
      diag.pruning_fallback = diag.pruning_fallback || search.pruning_fallback;
    }
    if (first_pass) {
      diag.initial_partition = partition;
      first_pass = false;
    }

    int failed_cluster = 0;
    try {
      std::vector<double> atoms;
      std::vector<double> weights;
      atoms.reserve(static_cast<std::size_t>(config.k));
      weights.reserve(static_cast<std::size_t>(config.k));
      int slot = 0;
      for (int i = 0; i < m_cur; ++i) {
        failed_cluster = i;
        int k_i = partition.orders[static_cast<std::size_t>(i)];
        MomentVector row = MomentVector::from_doubles(
            table.gamma[static_cast<std::size_t>(i)], MomentOrigin::estimated);

        std::vector<std::optional<double>> mask;
        if (!config.known_weights.empty())
          mask.assign(config.known_weights.begin() + slot,
                      config.known_weights.begin() + slot + k_i);
        bool all_known = !mask.empty() &&
                         std::all_of(mask.begin(), mask.end(),
                                     [](const auto& w) { return w.has_value(); });
        bool none_known = mask.empty() ||
                          std::none_of(mask.begin(), mask.end(),
                                       [](const auto& w) { return w.has_value(); });

        InversionDiagnostics idiag;
        DiscretePsd part = [&] {
          if (all_known) {
            std::vector<double> w(static_cast<std::size_t>(k_i));
            for (int j = 0; j < k_i; ++j)
              w[static_cast<std::size_t>(j)] = *mask[static_cast<std::size_t>(j)];
            return solve_known_weights(row, w, k_i, &idiag);
          }
          if (none_known) return moments_to_measure(row, k_i, &idiag);
          return solve_partial_weights(row, mask, k_i, &idiag);
        }();
        if (idiag.hankel_condition > 0.0)
          diag.hankel_conditions.push_back(idiag.hankel_condition);

        if (!atoms.empty() && part.atoms().front() <= atoms.back())
          throw InversionError(InversionError::Stage::atoms_not_separated,
                               "parts " + std::to_string(i - 1) + " and " +
                                   std::to_string(i) + " overlap");
        atoms.insert(atoms.end(), part.atoms().begin(), part.atoms().end());
        weights.insert(weights.end(), part.weights().begin(),
                       part.weights().end());
        slot += k_i;
      }

      // The weights already sum to sum_i v_i/v = 1 up to inversion error;
      // renormalize away that residual.
      double total = std::accumulate(weights.begin(), weights.end(), 0.0);
      for (double& w : weights) w /= total;

      EstimationResult result;
      result.theta_hat = DiscretePsd(std::move(atoms), std::move(weights));
      result.partition = partition;
      result.moments = std::move(table);
      diag.full_moment_path = (m_cur == 1);
      diag.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      result.diagnostics = std::move(diag);
      return result;
    } catch (const InversionError& err) {
      if (!config.allow_merge_fallback || m_cur == 1) {
        std::ostringstream msg;
        msg << "estimation failed at cluster " << failed_cluster << ": "
            << err.what();
        if (diag.merges > 0)
          msg << " (after " << diag.merges << " fallback merge(s))";
        throw EstimationError(msg.str());
      }
      int neighbour = nearest_neighbour(assignment, failed_cluster);
      std::ostringstream note;
      note << "cluster " << failed_cluster << ": " << err.what()
           << "; merging with cluster " << neighbour;
      diag.events.push_back(note.str());
      if (!forced.empty()) {
        int lo = std::min(failed_cluster, neighbour);
        forced[static_cast<std::size_t>(lo)] +=
            forced[static_cast<std::size_t>(lo) + 1];
        forced.erase(forced.begin() + lo + 1);
      }
      assignment = assignment.merged_pair(failed_cluster, neighbour);
      ++diag.merges;
    }
  }
}

}  // namespace

EstimationResult lme(const EigenSample& sample, const EstimationConfig& config) {
  return run_pipeline(sample, config, false);
}

EstimationResult glme(const EigenSample& sample, const EstimationConfig& config) {
  if (config.merge_plan.empty())
    throw DomainError("glme: a merge plan is required");
  return run_pipeline(sample, config, true);
}

EstimationResult estimate(const EigenSample& sample,
                          const EstimationConfig& config) {
  return config.merge_plan.empty() ? lme(sample, config) : glme(sample, config);
}

}  // namespace specest
