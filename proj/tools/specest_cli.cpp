// Command-line front end: support, density, moments, partition, estimate,
// simulate. Thin adapters over the library; all numerics live in core.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specest/contour_oracle.hpp"
#include "specest/errors.hpp"
#include "specest/esd.hpp"
#include "specest/mp_forward.hpp"
#include "specest/partition_search.hpp"
#include "specest/pipeline.hpp"
#include "specest/psd.hpp"
#include "specest/residues.hpp"
#include "specest/simulate.hpp"

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw specest::DomainError("cannot open output file: " + out_path);
  out << text;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(std::stod(part));
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::istringstream in(csv);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(std::stoi(part));
  return out;
}

// "0.5,0.25,?,?" -> fixed weights with free slots.
std::vector<std::optional<double>> parse_weight_mask(const std::string& csv) {
  std::vector<std::optional<double>> out;
  std::istringstream in(csv);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part == "?" || part.empty())
      out.push_back(std::nullopt);
    else
      out.push_back(std::stod(part));
  }
  return out;
}

// "1-2,4" (1-based) -> contiguous groups covering 1..m, singletons filled in.
std::vector<std::vector<int>> parse_merge_plan(const std::string& text, int m) {
  std::vector<std::vector<int>> listed;
  std::istringstream in(text);
  std::string group;
  while (std::getline(in, group, ',')) {
    auto dash = group.find('-');
    std::vector<int> ids;
    if (dash == std::string::npos) {
      ids.push_back(std::stoi(group) - 1);
    } else {
      int lo = std::stoi(group.substr(0, dash)) - 1;
      int hi = std::stoi(group.substr(dash + 1)) - 1;
      for (int i = lo; i <= hi; ++i) ids.push_back(i);
    }
    listed.push_back(std::move(ids));
  }
  std::vector<bool> covered(static_cast<std::size_t>(m), false);
  for (const auto& group_ids : listed)
    for (int idx : group_ids) {
      if (idx < 0 || idx >= m)
        throw specest::DomainError("merge plan index out of range");
      covered[static_cast<std::size_t>(idx)] = true;
    }
  std::vector<std::vector<int>> plan;
  std::size_t next = 0;
  for (int i = 0; i < m;) {
    if (covered[static_cast<std::size_t>(i)]) {
      if (next >= listed.size() || listed[next].front() != i)
        throw specest::DomainError("merge plan groups must be contiguous");
      plan.push_back(listed[next]);
      i += static_cast<int>(listed[next].size());
      ++next;
    } else {
      plan.push_back({i});
      ++i;
    }
  }
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population spectrum estimation from sample covariance eigenvalues"};
  app.require_subcommand(1);

  // --- support ---------------------------------------------------------
  auto* support_cmd = app.add_subcommand(
      "support", "Limiting spectral support intervals for a model");
  std::string sup_model, sup_out;
  double sup_c = 0.0;
  support_cmd->add_option("--model", sup_model, "model file (atom,weight records)")
      ->required();
  support_cmd->add_option("--c", sup_c, "dimension ratio p/n")->required();
  support_cmd->add_option("--out", sup_out, "output path (default stdout)");

  // --- density ---------------------------------------------------------
  auto* density_cmd = app.add_subcommand(
      "density", "Limiting spectral density on a grid");
  std::string den_model, den_out, den_grid;
  double den_c = 0.0;
  density_cmd->add_option("--model", den_model)->required();
  density_cmd->add_option("--c", den_c)->required();
  density_cmd->add_option("--grid", den_grid,
                          "lo:hi:count (default spans the support)");
  density_cmd->add_option("--out", den_out);

  // --- moments ---------------------------------------------------------
  auto* moments_cmd = app.add_subcommand(
      "moments", "Per-cluster moment estimates from sample eigenvalues");
  std::string mom_eigs, mom_out, mom_boundaries;
  int mom_p = 0, mom_n = 0, mom_m = 1, mom_order = 3;
  moments_cmd->add_option("--eigs", mom_eigs, "one-column eigenvalue file")
      ->required();
  moments_cmd->add_option("--p", mom_p)->required();
  moments_cmd->add_option("--n", mom_n)->required();
  moments_cmd->add_option("--m", mom_m, "cluster count (largest-gap split)");
  moments_cmd->add_option("--boundaries", mom_boundaries,
                          "comma-separated split abscissas (overrides --m)");
  moments_cmd->add_option("--max-order", mom_order, "highest moment order");
  moments_cmd->add_option("--out", mom_out);

  // --- partition -------------------------------------------------------
  auto* partition_cmd = app.add_subcommand(
      "partition", "Estimated per-cluster atom counts and the g-objective table");
  std::string par_eigs, par_out, par_boundaries;
  int par_p = 0, par_n = 0, par_m = 1, par_k = 0;
  partition_cmd->add_option("--eigs", par_eigs)->required();
  partition_cmd->add_option("--p", par_p)->required();
  partition_cmd->add_option("--n", par_n)->required();
  partition_cmd->add_option("--k", par_k, "total atom count")->required();
  partition_cmd->add_option("--m", par_m);
  partition_cmd->add_option("--boundaries", par_boundaries);
  partition_cmd->add_option("--out", par_out);

  // --- estimate --------------------------------------------------------
  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate the population spectrum from sample eigenvalues");
  std::string est_eigs, est_out, est_boundaries, est_weights, est_merge,
      est_orders, est_sizes;
  int est_p = 0, est_n = 0, est_m = 1, est_k = 0;
  bool est_no_fallback = false;
  estimate_cmd->add_option("--eigs", est_eigs)->required();
  estimate_cmd->add_option("--p", est_p)->required();
  estimate_cmd->add_option("--n", est_n)->required();
  estimate_cmd->add_option("--k", est_k)->required();
  estimate_cmd->add_option("--m", est_m);
  estimate_cmd->add_option("--boundaries", est_boundaries);
  estimate_cmd->add_option("--cluster-sizes", est_sizes,
                           "comma-separated per-cluster eigenvalue counts");
  estimate_cmd->add_option("--weights", est_weights,
                           "known weights, `?` for free slots, e.g. 0.5,0.25,?,?");
  estimate_cmd->add_option("--merge", est_merge, "clusters to merge, e.g. 1-2");
  estimate_cmd->add_option("--orders", est_orders,
                           "forced per-cluster orders, e.g. 1,1,2");
  estimate_cmd->add_flag("--no-fallback", est_no_fallback,
                         "fail instead of merging clusters on inversion errors");
  estimate_cmd->add_option("--out", est_out, "theta output path (default stdout)");

  // --- simulate --------------------------------------------------------
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Monte Carlo experiment from a config file");
  std::string sim_spec, sim_out;
  int sim_reps = 0, sim_threads = 0;
  std::uint64_t sim_seed = 0;
  simulate_cmd->add_option("--spec", sim_spec, "experiment config file")
      ->required();
  simulate_cmd->add_option("--seed", sim_seed, "master seed")->required();
  simulate_cmd->add_option("--reps", sim_reps, "replication count override");
  simulate_cmd->add_option("--threads", sim_threads, "worker pool size cap");
  simulate_cmd->add_option("--out", sim_out);

  try {
    app.parse(argc, argv);

    if (*support_cmd) {
      specest::DiscretePsd model = specest::DiscretePsd::load(sup_model);
      specest::SupportSet support = specest::support_intervals(model, sup_c);
      std::ostringstream out;
      out << "interval,lower,upper,delta_lower,delta_upper\n";
      for (std::size_t i = 0; i < support.count(); ++i)
        out << (i + 1) << "," << fmt(support.intervals[i].lower) << ","
            << fmt(support.intervals[i].upper) << ","
            << fmt(support.contour_bounds[i].first) << ","
            << fmt(support.contour_bounds[i].second) << "\n";
      write_output(out.str(), sup_out);
      return 0;
    }

    if (*density_cmd) {
      specest::DiscretePsd model = specest::DiscretePsd::load(den_model);
      double lo = 0.0, hi = 0.0;
      int count = 1000;
      if (den_grid.empty()) {
        specest::SupportSet support = specest::support_intervals(model, den_c);
        lo = 0.5 * support.intervals.front().lower;
        hi = 1.1 * support.intervals.back().upper;
      } else {
        std::istringstream in(den_grid);
        std::string part;
        std::getline(in, part, ':');
        lo = std::stod(part);
        std::getline(in, part, ':');
        hi = std::stod(part);
        if (std::getline(in, part, ':')) count = std::stoi(part);
      }
      std::ostringstream out;
      out << "x,density\n";
      for (int i = 0; i < count; ++i) {
        double x = lo + (hi - lo) * i / (count - 1);
        out << fmt(x) << "," << fmt(specest::lsd_density(x, model, den_c))
            << "\n";
      }
      write_output(out.str(), den_out);
      return 0;
    }

    if (*moments_cmd) {
      specest::EigenSample sample =
          specest::EigenSample::from_csv(mom_eigs, mom_p, mom_n);
      specest::ClusterAssignment assignment =
          mom_boundaries.empty()
              ? specest::cluster_eigenvalues(sample, mom_m)
              : specest::cluster_eigenvalues(sample,
                                             parse_doubles(mom_boundaries));
      specest::MomentTable table =
          specest::estimate_moment_table(sample, assignment, mom_order);
      std::ostringstream out;
      out << "cluster,order,gamma\n";
      for (int i = 0; i < table.clusters(); ++i)
        for (int l = 0; l <= table.max_order(i); ++l)
          out << (i + 1) << "," << l << "," << fmt(table.at(i, l)) << "\n";
      write_output(out.str(), mom_out);
      return 0;
    }

    if (*partition_cmd) {
      specest::EigenSample sample =
          specest::EigenSample::from_csv(par_eigs, par_p, par_n);
      specest::ClusterAssignment assignment =
          par_boundaries.empty()
              ? specest::cluster_eigenvalues(sample, par_m)
              : specest::cluster_eigenvalues(sample,
                                             parse_doubles(par_boundaries));
      int cap = par_k - assignment.clusters() + 1;
      specest::MomentTable table =
          specest::estimate_moment_table(sample, assignment, 2 * cap - 1);
      specest::PartitionSearchResult full =
          specest::estimate_partition(table, par_k, /*prune=*/false);
      std::ostringstream out;
      std::string best_label = full.best.to_string();
      std::replace(best_label.begin(), best_label.end(), ',', ';');
      out << "# k_hat = " << best_label << "\n";
      out << "partition,g_hat,best\n";
      for (const auto& [partition, g] : full.table) {
        std::string label = partition.to_string();
        std::replace(label.begin(), label.end(), ',', ';');
        out << label << "," << fmt(g) << ","
            << (partition == full.best ? 1 : 0) << "\n";
      }
      write_output(out.str(), par_out);
      return 0;
    }

    if (*estimate_cmd) {
      specest::EigenSample sample =
          specest::EigenSample::from_csv(est_eigs, est_p, est_n);
      specest::EstimationConfig config;
      config.k = est_k;
      config.m = est_m;
      if (!est_boundaries.empty()) config.boundaries = parse_doubles(est_boundaries);
      if (!est_sizes.empty()) config.cluster_sizes = parse_ints(est_sizes);
      if (!est_weights.empty()) config.known_weights = parse_weight_mask(est_weights);
      if (!est_orders.empty()) config.forced_orders = parse_ints(est_orders);
      if (!est_merge.empty()) {
        int m_total = !config.boundaries.empty()
                          ? static_cast<int>(config.boundaries.size()) + 1
                          : (!config.cluster_sizes.empty()
                                 ? static_cast<int>(config.cluster_sizes.size())
                                 : config.m);
        config.merge_plan = parse_merge_plan(est_merge, m_total);
      }
      config.allow_merge_fallback = !est_no_fallback;

      specest::EstimationResult result = specest::estimate(sample, config);
      write_output(result.theta_hat.to_record(), est_out);

      std::ostringstream diag;
      diag << "partition = " << result.partition.to_string() << "\n";
      diag << "initial_partition = "
           << result.diagnostics.initial_partition.to_string() << "\n";
      diag << "merges = " << result.diagnostics.merges << "\n";
      diag << "full_moment_path = "
           << (result.diagnostics.full_moment_path ? 1 : 0) << "\n";
      diag << "pruning_fallback = "
           << (result.diagnostics.pruning_fallback ? 1 : 0) << "\n";
      for (std::size_t i = 0; i < result.diagnostics.hankel_conditions.size(); ++i)
        diag << "hankel_condition_" << i << " = "
             << fmt(result.diagnostics.hankel_conditions[i]) << "\n";
      diag << "wall_seconds = " << result.diagnostics.wall_seconds << "\n";
      for (const std::string& event : result.diagnostics.events)
        diag << "event = " << event << "\n";
      std::cerr << diag.str();
      return 0;
    }

    if (*simulate_cmd) {
      specest::ExperimentSpec spec = specest::ExperimentSpec::from_file(sim_spec);
      spec.seed = sim_seed;
      if (sim_reps > 0) spec.replications = sim_reps;
      specest::ExperimentReport report =
          specest::run_experiment(spec, sim_threads);
      write_output(report.to_csv() + "\n" + report.to_text(), sim_out);
      std::cerr << report.timing_summary();
      return 0;
    }
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const specest::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const specest::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const specest::EstimationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
