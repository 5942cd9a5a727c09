#include "specest/simulate.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "specest/mp_forward.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace specest {

namespace {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_fixed(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

// splitmix64: the per-replication sub-seed chain and the Gaussian stream.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  splitmix64(state);
  return splitmix64(state);
}

// Deterministic standard-normal stream (Box-Muller over splitmix64 uniforms).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() {
    return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Multiplicities floor(p w_i) topped up by largest fractional remainder.
std::vector<int> largest_remainder_counts(const std::vector<double>& weights,
                                          int total) {
  std::vector<int> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = weights[i] * total;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - counts[i], i);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int extra = 0; extra < total - assigned; ++extra)
    ++counts[remainders[static_cast<std::size_t>(extra)].second];
  for (int c : counts)
    if (c < 1)
      throw DomainError(
          "largest-remainder rounding produced an empty multiplicity; p is "
          "too small for the model weights");
  return counts;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

VariantSpec parse_variant(const std::string& value) {
  std::vector<std::string> tokens = split_tokens(value);
  if (tokens.empty()) throw DomainError("variant: empty specification");

  VariantSpec variant;
  const std::string& kind = tokens[0];
  if (kind == "lme") variant.kind = VariantSpec::Kind::lme;
  else if (kind == "me") variant.kind = VariantSpec::Kind::me;
  else if (kind == "glme") variant.kind = VariantSpec::Kind::glme;
  else if (kind == "full") variant.kind = VariantSpec::Kind::full;
  else throw DomainError("variant: unknown kind `" + kind + "`");
  variant.name = kind;

  bool named = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    auto eq = tokens[i].find('=');
    if (eq == std::string::npos)
      throw DomainError("variant: expected key=value, got `" + tokens[i] + "`");
    std::string key = tokens[i].substr(0, eq);
    std::string val = tokens[i].substr(eq + 1);
    if (key == "weights") {
      if (val == "all") variant.weights = VariantSpec::WeightsMode::all;
      else if (val == "none") variant.weights = VariantSpec::WeightsMode::none;
      else {
        variant.weights = VariantSpec::WeightsMode::indices;
        for (const std::string& idx : split_on(val, ','))
          variant.known_indices.push_back(std::stoi(idx) - 1);
      }
    } else if (key == "m") {
      variant.m_override = std::stoi(val);
    } else if (key == "merge") {
      for (const std::string& group : split_on(val, ',')) {
        std::vector<int> ids;
        auto dash = group.find('-');
        if (dash == std::string::npos) {
          ids.push_back(std::stoi(group) - 1);
        } else {
          int lo = std::stoi(group.substr(0, dash)) - 1;
          int hi = std::stoi(group.substr(dash + 1)) - 1;
          for (int g = lo; g <= hi; ++g) ids.push_back(g);
        }
        variant.merge_plan.push_back(std::move(ids));
      }
    } else if (key == "boundaries") {
      for (const std::string& b : split_on(val, ';'))
        variant.boundaries.push_back(std::stod(b));
    } else if (key == "name") {
      variant.name = val;
      named = true;
    } else {
      throw DomainError("variant: unknown key `" + key + "`");
    }
  }
  if (variant.kind == VariantSpec::Kind::me)
    variant.weights = VariantSpec::WeightsMode::all;
  if (!named && variant.weights == VariantSpec::WeightsMode::indices)
    variant.name += "*";
  return variant;
}

std::vector<std::optional<double>> resolve_weights(const VariantSpec& variant,
                                                   const DiscretePsd& model) {
  std::vector<std::optional<double>> out;
  switch (variant.weights) {
    case VariantSpec::WeightsMode::none:
      break;
    case VariantSpec::WeightsMode::all:
      out.assign(model.weights().begin(), model.weights().end());
      break;
    case VariantSpec::WeightsMode::indices:
      out.assign(model.size(), std::nullopt);
      for (int idx : variant.known_indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= model.size())
          throw DomainError("variant: weight index out of range");
        out[static_cast<std::size_t>(idx)] = model.weight(static_cast<std::size_t>(idx));
      }
      break;
  }
  return out;
}

// Division boundaries from the model's limiting support: midpoints of the
// inter-interval gaps, or of the m-1 widest gaps when a coarser division is
// requested. The experiments presume the separation of the support is known;
// raw largest-gap splitting puts boundaries inside sparse upper clusters.
std::vector<double> support_gap_boundaries(const DiscretePsd& model, double c,
                                           int m) {
  SupportSet support = support_intervals(model, c);
  int m_true = static_cast<int>(support.count());
  if (m > m_true)
    throw DomainError("experiment: requested " + std::to_string(m) +
                      " clusters but the limiting support has only " +
                      std::to_string(m_true) + " intervals");
  struct Gap {
    double width;
    double midpoint;
  };
  std::vector<Gap> gaps;
  for (int i = 0; i + 1 < m_true; ++i) {
    double lo = support.intervals[static_cast<std::size_t>(i)].upper;
    double hi = support.intervals[static_cast<std::size_t>(i) + 1].lower;
    gaps.push_back({hi - lo, 0.5 * (lo + hi)});
  }
  std::sort(gaps.begin(), gaps.end(),
            [](const Gap& a, const Gap& b) { return a.width > b.width; });
  gaps.resize(static_cast<std::size_t>(m - 1));
  std::vector<double> boundaries;
  for (const Gap& gap : gaps) boundaries.push_back(gap.midpoint);
  std::sort(boundaries.begin(), boundaries.end());
  return boundaries;
}

EstimationConfig build_config(const VariantSpec& variant,
                              const ExperimentSpec& spec, int p) {
  EstimationConfig config;
  config.k = spec.k;
  config.m = variant.m_override > 0 ? variant.m_override : spec.m;
  config.known_weights = resolve_weights(variant, spec.model);
  double c = spec.ratio();
  switch (variant.kind) {
    case VariantSpec::Kind::lme:
      config.boundaries =
          variant.boundaries.empty()
              ? support_gap_boundaries(spec.model, c, config.m)
              : variant.boundaries;
      break;
    case VariantSpec::Kind::me:
      config.cluster_sizes =
          largest_remainder_counts(spec.model.weights(), p);
      config.forced_orders.assign(spec.model.size(), 1);
      break;
    case VariantSpec::Kind::glme: {
      // The listed groups name the clusters to merge within the m-cluster
      // division; uncovered clusters stay as singletons.
      std::vector<bool> covered(static_cast<std::size_t>(config.m), false);
      for (const auto& group : variant.merge_plan)
        for (int idx : group) {
          if (idx < 0 || idx >= config.m)
            throw DomainError("glme variant: merge group index out of range");
          covered[static_cast<std::size_t>(idx)] = true;
        }
      std::vector<std::vector<int>> plan;
      std::size_t next_listed = 0;
      for (int i = 0; i < config.m;) {
        if (covered[static_cast<std::size_t>(i)]) {
          if (next_listed >= variant.merge_plan.size() ||
              variant.merge_plan[next_listed].front() != i)
            throw DomainError("glme variant: merge groups must be contiguous");
          plan.push_back(variant.merge_plan[next_listed]);
          i += static_cast<int>(variant.merge_plan[next_listed].size());
          ++next_listed;
        } else {
          plan.push_back({i});
          ++i;
        }
      }
      config.merge_plan = std::move(plan);
      config.boundaries = variant.boundaries.empty()
                              ? support_gap_boundaries(spec.model, c, config.m)
                              : variant.boundaries;
      break;
    }
    case VariantSpec::Kind::full:
      config.m = 1;
      break;
  }
  return config;
}

// The partition the pipeline would estimate before any fallback, used to fill
// the frequency column when the full estimation fails.
Partition initial_partition_of(const EigenSample& sample,
                               const EstimationConfig& config) {
  if (!config.forced_orders.empty()) return Partition(config.forced_orders);
  ClusterAssignment assignment =
      !config.boundaries.empty()
          ? cluster_eigenvalues(sample, config.boundaries)
          : (!config.cluster_sizes.empty()
                 ? cluster_by_sizes(sample, config.cluster_sizes)
                 : cluster_eigenvalues(sample, config.m));
  if (!config.merge_plan.empty()) assignment = assignment.merged(config.merge_plan);
  int cap = config.k - assignment.clusters() + 1;
  MomentTable table = estimate_moment_table(sample, assignment, 2 * cap - 1);
  return estimate_partition(table, config.k).best;
}

struct RepOutcome {
  bool ok = false;
  std::string partition;  // initial partition, or "" when even that failed
  std::vector<double> atoms;
  std::vector<double> weights;
  double d = 0.0;
  double seconds = 0.0;
};

struct Accumulator {
  int count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }
  double sd() const { return count > 1 ? std::sqrt(m2 / (count - 1)) : 0.0; }
};

}  // namespace

double ExperimentSpec::ratio() const {
  if (sizes.empty()) throw DomainError("experiment: no sizes");
  double r = static_cast<double>(sizes[0].p) / sizes[0].n;
  for (const DimensionPair& size : sizes) {
    double ri = static_cast<double>(size.p) / size.n;
    if (std::abs(ri - r) > 1e-12)
      throw DomainError("experiment: p/n must stay constant across sizes");
  }
  return r;
}

ExperimentSpec ExperimentSpec::parse(std::istream& in) {
  std::vector<double> atoms, weights;
  std::string model_path;
  ExperimentSpec spec;
  bool have_seed = false;

  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw DomainError("experiment config: expected key = value, got: " + line);
      continue;
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());

    if (key == "atoms") {
      for (const std::string& tok : split_tokens(value)) atoms.push_back(std::stod(tok));
    } else if (key == "weights") {
      for (const std::string& tok : split_tokens(value)) weights.push_back(std::stod(tok));
    } else if (key == "model") {
      std::vector<std::string> tok = split_tokens(value);
      if (tok.size() != 1) throw DomainError("experiment config: model takes one path");
      model_path = tok[0];
    } else if (key == "sizes") {
      for (const std::string& tok : split_tokens(value)) {
        auto x = tok.find('x');
        if (x == std::string::npos)
          throw DomainError("experiment config: sizes entries look like 320x1000");
        spec.sizes.push_back(
            {std::stoi(tok.substr(0, x)), std::stoi(tok.substr(x + 1))});
      }
    } else if (key == "replications") {
      spec.replications = std::stoi(value);
    } else if (key == "seed") {
      spec.seed = std::stoull(value);
      have_seed = true;
    } else if (key == "k") {
      spec.k = std::stoi(value);
    } else if (key == "m") {
      spec.m = std::stoi(value);
    } else if (key == "variant") {
      spec.variants.push_back(parse_variant(value));
    } else {
      throw DomainError("experiment config: unknown key `" + key + "`");
    }
  }

  if (!model_path.empty()) {
    spec.model = DiscretePsd::load(model_path);
  } else {
    if (atoms.empty())
      throw DomainError("experiment config: atoms/weights or model required");
    spec.model = DiscretePsd(std::move(atoms), std::move(weights));
  }
  if (spec.k == 0) spec.k = static_cast<int>(spec.model.size());
  if (spec.variants.empty())
    spec.variants.push_back(parse_variant("lme"));
  if (spec.sizes.empty())
    throw DomainError("experiment config: sizes required");
  (void)have_seed;  // a missing seed stays 0; the CLI supplies its own
  spec.ratio();     // validates constancy
  return spec;
}

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open experiment config: " + path);
  return parse(in);
}

EigenSample generate_eigen_sample(const DiscretePsd& theta, int p, int n,
                                  std::uint64_t seed) {
  if (p < 1 || n < 1) throw DomainError("generate_eigen_sample: p, n >= 1");
  std::vector<int> counts = largest_remainder_counts(theta.weights(), p);

  // Rows of X scaled by sqrt(sigma_i) give Sigma^{1/2} X directly.
  Eigen::MatrixXd x(p, n);
  GaussianStream gauss(seed);
  int row = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double scale = std::sqrt(theta.atom(i));
    for (int r = 0; r < counts[i]; ++r, ++row)
      for (int col = 0; col < n; ++col) x(row, col) = scale * gauss.next();
  }

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  s.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      s.selfadjointView<Eigen::Lower>(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("generate_eigen_sample: eigensolve failed");

  std::vector<double> values(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return EigenSample::from_values(std::move(values), p, n);
}

double wasserstein(const DiscretePsd& a, const DiscretePsd& b) {
  if (std::abs(a.total_mass() - 1.0) > 1e-10 ||
      std::abs(b.total_mass() - 1.0) > 1e-10)
    throw DomainError("wasserstein: both measures must have unit mass");

  std::vector<double> cum_a(a.size()), cum_b(b.size());
  std::partial_sum(a.weights().begin(), a.weights().end(), cum_a.begin());
  std::partial_sum(b.weights().begin(), b.weights().end(), cum_b.begin());
  cum_a.back() = 1.0;
  cum_b.back() = 1.0;

  double d = 0.0;
  double t = 0.0;
  std::size_t ia = 0, ib = 0;
  while (t < 1.0) {
    double next = std::min(cum_a[ia], cum_b[ib]);
    d += (next - t) * std::abs(a.atom(ia) - b.atom(ib));
    t = next;
    if (cum_a[ia] <= t && ia + 1 < cum_a.size()) ++ia;
    if (cum_b[ib] <= t && ib + 1 < cum_b.size()) ++ib;
    if (t >= 1.0) break;
  }
  return d;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, int threads) {
  if (spec.replications < 1)
    throw DomainError("run_experiment: replications must be >= 1");
  spec.ratio();

  ExperimentReport report;
  report.model_record = spec.model.to_record();
  report.ratio = spec.ratio();
  report.replications = spec.replications;
  report.seed = spec.seed;

  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  for (std::size_t size_idx = 0; size_idx < spec.sizes.size(); ++size_idx) {
    DimensionPair size = spec.sizes[size_idx];
    std::size_t n_variants = spec.variants.size();

    std::vector<std::vector<RepOutcome>> outcomes(
        static_cast<std::size_t>(spec.replications),
        std::vector<RepOutcome>(n_variants));

    std::atomic<int> next_rep{0};
    auto worker = [&]() {
      for (;;) {
        int rep = next_rep.fetch_add(1);
        if (rep >= spec.replications) break;
        std::uint64_t rep_seed =
            sub_seed(spec.seed, size_idx * 1000003ULL +
                                    static_cast<std::uint64_t>(rep));
        EigenSample sample =
            generate_eigen_sample(spec.model, size.p, size.n, rep_seed);
        for (std::size_t vi = 0; vi < n_variants; ++vi) {
          RepOutcome& out = outcomes[static_cast<std::size_t>(rep)][vi];
          EstimationConfig config = build_config(spec.variants[vi], spec, size.p);
          auto t0 = std::chrono::steady_clock::now();
          try {
            EstimationResult result = estimate(sample, config);
            out.ok = true;
            out.partition = result.diagnostics.initial_partition.to_string();
            out.atoms = result.theta_hat.atoms();
            out.weights = result.theta_hat.weights();
            out.d = wasserstein(result.theta_hat, spec.model);
          } catch (const std::exception&) {
            out.ok = false;
            try {
              out.partition = initial_partition_of(sample, config).to_string();
            } catch (const std::exception&) {
              out.partition.clear();
            }
          }
          out.seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        }
      }
    };

    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& thread : pool) thread.join();

    SizeReport size_report;
    size_report.size = size;
    for (std::size_t vi = 0; vi < n_variants; ++vi) {
      VariantStats stats;
      stats.name = spec.variants[vi].name;
      stats.replications = spec.replications;
      std::vector<Accumulator> atom_acc(spec.model.size());
      std::vector<Accumulator> weight_acc(spec.model.size());
      Accumulator d_acc;
      std::map<std::string, int> freq;
      double seconds = 0.0;
      for (int rep = 0; rep < spec.replications; ++rep) {
        const RepOutcome& out = outcomes[static_cast<std::size_t>(rep)][vi];
        seconds += out.seconds;
        freq[out.partition.empty() ? "(failed)" : out.partition] += 1;
        if (!out.ok) {
          ++stats.failures;
          continue;
        }
        for (std::size_t j = 0; j < spec.model.size(); ++j) {
          atom_acc[j].add(out.atoms[j]);
          weight_acc[j].add(out.weights[j]);
        }
        d_acc.add(out.d);
      }
      for (std::size_t j = 0; j < spec.model.size(); ++j) {
        stats.atom_mean.push_back(atom_acc[j].mean);
        stats.atom_sd.push_back(atom_acc[j].sd());
        stats.weight_mean.push_back(weight_acc[j].mean);
        stats.weight_sd.push_back(weight_acc[j].sd());
      }
      stats.d_mean = d_acc.mean;
      stats.d_sd = d_acc.sd();
      stats.seconds_per_rep = seconds / spec.replications;
      stats.partition_freq.assign(freq.begin(), freq.end());
      std::sort(stats.partition_freq.begin(), stats.partition_freq.end(),
                [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
                });
      size_report.variants.push_back(std::move(stats));
    }
    report.sizes.push_back(std::move(size_report));
  }
  return report;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "# experiment report; sd uses the n-1 denominator\n";
  out << "# seed=" << seed << " replications=" << replications
      << " ratio=" << format_full(ratio) << "\n";
  for (const std::string& line : split_on(model_record, '\n'))
    if (!line.empty()) out << "# model " << line << "\n";
  out << "p,n,variant,metric,mean,sd\n";
  for (const SizeReport& size : sizes) {
    for (const VariantStats& stats : size.variants) {
      std::string prefix = std::to_string(size.size.p) + "," +
                           std::to_string(size.size.n) + "," + stats.name + ",";
      for (std::size_t j = 0; j < stats.atom_mean.size(); ++j)
        out << prefix << "a" << (j + 1) << "," << format_full(stats.atom_mean[j])
            << "," << format_full(stats.atom_sd[j]) << "\n";
      for (std::size_t j = 0; j < stats.weight_mean.size(); ++j)
        out << prefix << "w" << (j + 1) << ","
            << format_full(stats.weight_mean[j]) << ","
            << format_full(stats.weight_sd[j]) << "\n";
      out << prefix << "d," << format_full(stats.d_mean) << ","
          << format_full(stats.d_sd) << "\n";
      out << prefix << "failures," << stats.failures << ",\n";
      for (const auto& [partition, count] : stats.partition_freq) {
        std::string label = partition;
        std::replace(label.begin(), label.end(), ',', ';');
        out << prefix << "partition" << label << "," << count << ",\n";
      }
    }
  }
  return out.str();
}

std::string ExperimentReport::to_text() const {
  std::ostringstream out;
  out << "Monte Carlo report (sd denominator: n-1); seed=" << seed
      << ", replications=" << replications << "\n";
  for (const SizeReport& size : sizes) {
    out << "\n(p,n) = (" << size.size.p << "," << size.size.n << ")\n";
    std::size_t n_atoms = size.variants.empty()
                              ? 0
                              : size.variants[0].atom_mean.size();
    out << "variant      stat ";
    for (std::size_t j = 0; j < n_atoms; ++j) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%10s", ("a" + std::to_string(j + 1)).c_str());
      out << buf;
    }
    for (std::size_t j = 0; j < n_atoms; ++j) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%10s", ("w" + std::to_string(j + 1)).c_str());
      out << buf;
    }
    out << "         d  fail\n";
    for (const VariantStats& stats : size.variants) {
      char name[32];
      std::snprintf(name, sizeof(name), "%-12s", stats.name.c_str());
      out << name << " Mean ";
      for (double v : stats.atom_mean) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%10.4f", v);
        out << buf;
      }
      for (double v : stats.weight_mean) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%10.4f", v);
        out << buf;
      }
      out << " " << format_fixed(stats.d_mean) << "  " << stats.failures << "\n";
      out << "             St.D ";
      for (double v : stats.atom_sd) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%10.4f", v);
        out << buf;
      }
      for (double v : stats.weight_sd) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%10.4f", v);
        out << buf;
      }
      out << " " << format_fixed(stats.d_sd) << "\n";
    }
    out << "partition frequencies:\n";
    for (const VariantStats& stats : size.variants) {
      out << "  " << stats.name << ":";
      for (const auto& [partition, count] : stats.partition_freq)
        out << " " << partition << " " << count;
      out << "\n";
    }
  }
  return out.str();
}

std::string ExperimentReport::timing_summary() const {
  std::ostringstream out;
  out << "wall-clock per replication:\n";
  for (const SizeReport& size : sizes)
    for (const VariantStats& stats : size.variants)
      out << "  (" << size.size.p << "," << size.size.n << ") " << stats.name
          << ": " << format_fixed(stats.seconds_per_rep) << " s\n";
  return out.str();
}

}  // namespace specest
