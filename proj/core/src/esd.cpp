#include "specest/esd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace specest {

EigenSample::EigenSample(std::vector<double> lambdas, int p, int n)
    : lambdas_(std::move(lambdas)), p_(p), n_(n) {
  if (p_ < 1 || n_ < 1) throw DomainError("EigenSample: p and n must be >= 1");
  int v = std::min(p_, n_);
  if (static_cast<int>(lambdas_.size()) != v)
    throw DomainError("EigenSample: expected " + std::to_string(v) +
                      " nonzero eigenvalues, got " +
                      std::to_string(lambdas_.size()));
  std::sort(lambdas_.begin(), lambdas_.end());
  if (!(lambdas_.front() > 0.0))
    throw DomainError("EigenSample: eigenvalues must be strictly positive");
}

EigenSample EigenSample::from_values(std::vector<double> values, int p, int n) {
  if (p < 1 || n < 1) throw DomainError("EigenSample: p and n must be >= 1");
  int v = std::min(p, n);
  std::sort(values.begin(), values.end());
  if (static_cast<int>(values.size()) == p && p > v) {
    double top = std::abs(values.back());
    for (int i = 0; i < p - v; ++i)
      if (std::abs(values[static_cast<std::size_t>(i)]) > 1e-8 * top)
        throw DomainError(
            "EigenSample: expected the " + std::to_string(p - v) +
            " smallest eigenvalues to be numerically zero");
    values.erase(values.begin(), values.begin() + (p - v));
  }
  return EigenSample(std::move(values), p, n);
}

EigenSample EigenSample::from_csv(const std::string& path, int p, int n) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open eigenvalue file: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    values.push_back(std::stod(line));
  }
  return from_values(std::move(values), p, n);
}

namespace {

double factorial(int j) {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return f;
}

template <typename Scalar>
Scalar stieltjes_impl(Scalar z, const EigenSample& sample, int order) {
  if (order < 0) throw DomainError("companion_stieltjes_n: order must be >= 0");
  int v = sample.v();
  double coef = 1.0 - static_cast<double>(v) / sample.n();
  double jfact = factorial(order);

  if (std::abs(z) < 1e-300)
    throw DomainError("companion_stieltjes_n: z = 0 is a pole");

  Scalar acc = Scalar(0);
  if (coef != 0.0) {
    // -(1 - v/n) (-1)^j j! / z^{j+1}
    Scalar zpow = z;
    for (int i = 0; i < order; ++i) zpow *= z;
    double sign = (order % 2 == 0) ? 1.0 : -1.0;
    acc = Scalar(-coef * sign * jfact) / zpow;
  }

  long double re = 0.0L, im = 0.0L;
  for (double lambda : sample.lambdas()) {
    Scalar d = Scalar(lambda) - z;
    if (std::abs(d) < 1e-300)
      throw DomainError("companion_stieltjes_n: z equals a sample eigenvalue");
    Scalar term = Scalar(1.0) / d;
    Scalar power = term;
    for (int i = 0; i < order; ++i) power *= term;
    if constexpr (std::is_same_v<Scalar, double>) {
      re += power;
    } else {
      re += power.real();
      im += power.imag();
    }
  }
  double scale = jfact / sample.n();
  if constexpr (std::is_same_v<Scalar, double>) {
    return acc + scale * static_cast<double>(re);
  } else {
    return acc + Scalar(scale * static_cast<double>(re),
                        scale * static_cast<double>(im));
  }
}

}  // namespace

std::complex<double> companion_stieltjes_n(std::complex<double> z,
                                           const EigenSample& sample,
                                           int order) {
  return stieltjes_impl(z, sample, order);
}

double companion_stieltjes_n(double z, const EigenSample& sample, int order) {
  return stieltjes_impl(z, sample, order);
}

namespace {

// sum_i lambda_i / (lambda_i - u) - n: strictly increasing between poles,
// so each bracket holds exactly one root.
double zero_equation(double u, const std::vector<double>& lambdas, int n) {
  long double acc = -static_cast<long double>(n);
  for (double lambda : lambdas) acc += lambda / (lambda - u);
  return static_cast<double>(acc);
}

double bisect_zero(double lo, double hi, const std::vector<double>& lambdas,
                   int n) {
  double flo = zero_equation(lo, lambdas, n);
  double fhi = zero_equation(hi, lambdas, n);
  if ((flo > 0) == (fhi > 0))
    throw NumericalError("zeros_of_companion: no sign change in bracket [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) break;
    double fmid = zero_equation(mid, lambdas, n);
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  // Newton polish inside the bracket; the equation is strictly increasing.
  double mu = 0.5 * (lo + hi);
  for (int iter = 0; iter < 3; ++iter) {
    long double value = -static_cast<long double>(n);
    long double slope = 0.0L;
    for (double lambda : lambdas) {
      long double diff = lambda - mu;
      value += lambda / diff;
      slope += lambda / (diff * diff);
    }
    if (slope <= 0.0L) break;
    double next = mu - static_cast<double>(value / slope);
    if (next <= lo || next >= hi) break;
    mu = next;
  }
  return mu;
}

}  // namespace

std::vector<double> zeros_of_companion(const EigenSample& sample,
                                       std::vector<std::string>* log) {
  std::vector<double> lambdas = sample.lambdas();
  int v = sample.v();

  // Numerically equal neighbours break the brackets; jitter them apart.
  bool jittered = false;
  for (int i = 1; i < v; ++i) {
    if (lambdas[i] - lambdas[i - 1] <= 1e-12 * lambdas[i]) {
      lambdas[i] = lambdas[i - 1] * (1.0 + 1e-12);
      jittered = true;
    }
  }
  if (jittered && log)
    log->push_back("zeros_of_companion: applied 1e-12 relative jitter to "
                   "repeated eigenvalues");

  std::vector<double> zeros(static_cast<std::size_t>(v));
  if (sample.p() < sample.n()) {
    zeros[0] = bisect_zero(lambdas[0] * 1e-12, lambdas[0] * (1.0 - 1e-12),
                           lambdas, sample.n());
  } else {
    // p = n convention (mu_1 = 0); for p > n the transform has only v - 1
    // real zeros and the same convention applies.
    zeros[0] = 0.0;
  }
  // Margins one decade inside the jitter scale keep the brackets nonempty
  // even for eigenvalue pairs separated by the 1e-12 perturbation.
  for (int i = 1; i < v; ++i)
    zeros[static_cast<std::size_t>(i)] =
        bisect_zero(lambdas[static_cast<std::size_t>(i - 1)] * (1.0 + 1e-13),
                    lambdas[static_cast<std::size_t>(i)] * (1.0 - 1e-13),
                    lambdas, sample.n());
  return zeros;
}

ClusterAssignment::ClusterAssignment(const EigenSample& sample,
                                     std::vector<int> fences,
                                     std::vector<double> zeros)
    : lambdas_(sample.lambdas()), zeros_(std::move(zeros)),
      fences_(std::move(fences)) {
  if (fences_.size() < 2 || fences_.front() != 0 ||
      fences_.back() != sample.v())
    throw DomainError("ClusterAssignment: fences must run from 0 to v");
  for (std::size_t i = 1; i < fences_.size(); ++i)
    if (fences_[i] <= fences_[i - 1])
      throw DomainError("ClusterAssignment: empty cluster");
  if (zeros_.size() != lambdas_.size())
    throw DomainError("ClusterAssignment: zero count must equal v");
}

std::pair<int, int> ClusterAssignment::range(int i) const {
  if (i < 0 || i >= clusters())
    throw DomainError("ClusterAssignment: cluster index out of range");
  return {fences_[static_cast<std::size_t>(i)],
          fences_[static_cast<std::size_t>(i) + 1]};
}

int ClusterAssignment::count(int i) const {
  auto [first, last] = range(i);
  return last - first;
}

std::vector<double> ClusterAssignment::a_set(int i) const {
  auto [first, last] = range(i);
  return {lambdas_.begin() + first, lambdas_.begin() + last};
}

std::vector<double> ClusterAssignment::b_set(int i) const {
  auto [first, last] = range(i);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(last - first));
  for (int j = first; j < last; ++j) {
    double mu = zeros_[static_cast<std::size_t>(j)];
    if (mu != 0.0) out.push_back(mu);
  }
  return out;
}

ClusterAssignment ClusterAssignment::merged(
    const std::vector<std::vector<int>>& groups) const {
  int expected = 0;
  std::vector<int> fences{0};
  for (const auto& group : groups) {
    if (group.empty()) throw DomainError("merge plan: empty group");
    for (int idx : group) {
      if (idx != expected)
        throw DomainError(
            "merge plan: groups must be contiguous and cover clusters in "
            "order");
      ++expected;
    }
    fences.push_back(fences_[static_cast<std::size_t>(expected)]);
  }
  if (expected != clusters())
    throw DomainError("merge plan: groups must cover every cluster");
  ClusterAssignment out = *this;
  out.fences_ = std::move(fences);
  return out;
}

ClusterAssignment ClusterAssignment::merged_pair(int i, int j) const {
  if (std::abs(i - j) != 1) throw DomainError("merged_pair: non-adjacent clusters");
  int lo = std::min(i, j);
  ClusterAssignment out = *this;
  out.fences_.erase(out.fences_.begin() + lo + 1);
  return out;
}

ClusterAssignment cluster_eigenvalues(const EigenSample& sample, int m) {
  if (m < 1 || m > sample.v())
    throw DomainError("cluster_eigenvalues: need 1 <= m <= v");
  const std::vector<double>& lambdas = sample.lambdas();

  // Split at the m-1 largest consecutive gaps.
  std::vector<int> order(lambdas.size() > 0 ? lambdas.size() - 1 : 0);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ga = lambdas[static_cast<std::size_t>(a) + 1] - lambdas[static_cast<std::size_t>(a)];
    double gb = lambdas[static_cast<std::size_t>(b) + 1] - lambdas[static_cast<std::size_t>(b)];
    if (ga != gb) return ga > gb;
    return a < b;
  });
  std::vector<int> cuts(order.begin(), order.begin() + (m - 1));
  std::sort(cuts.begin(), cuts.end());

  std::vector<int> fences{0};
  for (int cut : cuts) fences.push_back(cut + 1);
  fences.push_back(sample.v());
  return ClusterAssignment(sample, std::move(fences), zeros_of_companion(sample));
}

ClusterAssignment cluster_eigenvalues(const EigenSample& sample,
                                      const std::vector<double>& boundaries) {
  const std::vector<double>& lambdas = sample.lambdas();
  std::vector<double> cuts = boundaries;
  std::sort(cuts.begin(), cuts.end());

  std::vector<int> fences{0};
  for (double cut : cuts) {
    for (double lambda : lambdas)
      if (lambda == cut)
        throw DomainError("cluster_eigenvalues: boundary " +
                          std::to_string(cut) +
                          " coincides with a sample eigenvalue");
    auto it = std::upper_bound(lambdas.begin(), lambdas.end(), cut);
    fences.push_back(static_cast<int>(it - lambdas.begin()));
  }
  fences.push_back(sample.v());
  return ClusterAssignment(sample, std::move(fences), zeros_of_companion(sample));
}

ClusterAssignment cluster_by_sizes(const EigenSample& sample,
                                   const std::vector<int>& sizes) {
  std::vector<int> fences{0};
  for (int size : sizes) {
    if (size < 1) throw DomainError("cluster_by_sizes: sizes must be >= 1");
    fences.push_back(fences.back() + size);
  }
  if (fences.back() != sample.v())
    throw DomainError("cluster_by_sizes: sizes must sum to v");
  return ClusterAssignment(sample, std::move(fences), zeros_of_companion(sample));
}

}  // namespace specest
