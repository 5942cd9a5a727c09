#include "specest/residues.hpp"

#include <cmath>
#include <string>

namespace specest {

namespace {

// Truncated power series over long double, fixed length.
struct Series {
  std::vector<long double> c;

  explicit Series(std::size_t len) : c(len, 0.0L) {}

  static Series product(const Series& a, const Series& b) {
    Series out(a.c.size());
    for (std::size_t i = 0; i < a.c.size(); ++i) {
      if (a.c[i] == 0.0L) continue;
      for (std::size_t j = 0; i + j < out.c.size(); ++j)
        out.c[i + j] += a.c[i] * b.c[j];
    }
    return out;
  }

  // 1/g for g with nonzero constant term.
  static Series reciprocal(const Series& g) {
    Series out(g.c.size());
    out.c[0] = 1.0L / g.c[0];
    for (std::size_t k = 1; k < g.c.size(); ++k) {
      long double acc = 0.0L;
      for (std::size_t i = 1; i <= k; ++i) acc += g.c[i] * out.c[k - i];
      out.c[k] = -acc / g.c[0];
    }
    return out;
  }

  static Series power(Series base, int exponent) {
    Series out(base.c.size());
    out.c[0] = 1.0L;
    while (exponent > 0) {
      if (exponent & 1) out = product(out, base);
      base = product(base, base);
      exponent >>= 1;
    }
    return out;
  }
};

double derivative_at(double mu, const EigenSample& sample, int order) {
  return companion_stieltjes_n(mu, sample, order);
}

void check_is_zero(double mu, const EigenSample& sample) {
  double value = companion_stieltjes_n(mu, sample, 0);
  double slope = companion_stieltjes_n(mu, sample, 1);
  if (std::abs(slope) < 1e-14)
    throw NumericalError("residue_at_mu: degenerate zero, |s_n'(mu)| < 1e-14");
  if (std::abs(value) > 1e-9 * (1.0 + std::abs(mu * slope)))
    throw DomainError("residue_at_mu: s_n(" + std::to_string(mu) +
                      ") = " + std::to_string(value) + " is not a zero");
}

}  // namespace

double residue_at_lambda(double lambda, int l) {
  if (l < 1) throw DomainError("residue_at_lambda: l must be >= 1");
  return l == 1 ? -lambda : 0.0;
}

double residue_at_mu_series(double mu, const EigenSample& sample, int l) {
  if (l < 1) throw DomainError("residue_at_mu: l must be >= 1");
  check_is_zero(mu, sample);

  // s_n(z) = t * g(t) with t = z - mu and g(t) = sum_j d_{j+1} t^j, so
  // f_l = (mu + t) s_n'(t) / (t^l g(t)^l); the residue is the t^{l-1}
  // coefficient of (mu + t) s_n'(t) g(t)^{-l}.
  std::size_t len = static_cast<std::size_t>(l);
  std::vector<long double> d(static_cast<std::size_t>(l) + 2, 0.0L);
  long double fact = 1.0L;
  for (int j = 1; j <= l + 1; ++j) {
    fact *= j;
    d[static_cast<std::size_t>(j)] =
        static_cast<long double>(derivative_at(mu, sample, j)) / fact;
  }

  Series g(len);
  for (std::size_t i = 0; i < len; ++i) g.c[i] = d[i + 1];
  Series sprime(len);
  for (std::size_t i = 0; i < len; ++i)
    sprime.c[i] = static_cast<long double>(i + 1) * d[i + 1];
  Series numerator(len);
  for (std::size_t i = 0; i < len; ++i) {
    numerator.c[i] = static_cast<long double>(mu) * sprime.c[i];
    if (i >= 1) numerator.c[i] += sprime.c[i - 1];
  }

  Series laurent = Series::product(numerator, Series::power(Series::reciprocal(g), l));
  return static_cast<double>(laurent.c[len - 1]);
}

double residue_at_mu(double mu, const EigenSample& sample, int l) {
  if (l < 1) throw DomainError("residue_at_mu: l must be >= 1");
  if (l > 5) return residue_at_mu_series(mu, sample, l);
  check_is_zero(mu, sample);

  if (l == 1) return mu;
  double s1 = derivative_at(mu, sample, 1);
  if (l == 2) return 1.0 / s1;
  double s2 = derivative_at(mu, sample, 2);
  if (l == 3) return -s2 / (2.0 * s1 * s1 * s1);
  double s3 = derivative_at(mu, sample, 3);
  if (l == 4) return (3.0 * s2 * s2 - s1 * s3) / (6.0 * std::pow(s1, 5));
  double s4 = derivative_at(mu, sample, 4);
  return -(15.0 * s2 * s2 * s2 - 10.0 * s1 * s2 * s3 + s1 * s1 * s4) /
         (24.0 * std::pow(s1, 7));
}

std::vector<double> estimate_cluster_moments(const EigenSample& sample,
                                             const ClusterAssignment& assignment,
                                             int cluster, int max_order) {
  if (max_order < 0)
    throw DomainError("estimate_cluster_moments: max_order must be >= 0");

  std::vector<double> gamma(static_cast<std::size_t>(max_order) + 1, 0.0);
  gamma[0] = static_cast<double>(assignment.count(cluster)) / assignment.total();

  std::vector<double> a_set = assignment.a_set(cluster);
  std::vector<double> b_set = assignment.b_set(cluster);
  double ratio = static_cast<double>(sample.n()) / sample.p();

  for (int l = 1; l <= max_order; ++l) {
    long double acc = 0.0L;
    for (double lambda : a_set) acc += residue_at_lambda(lambda, l);
    for (double mu : b_set) acc += residue_at_mu(mu, sample, l);
    double sign = (l % 2 == 0) ? 1.0 : -1.0;
    gamma[static_cast<std::size_t>(l)] =
        sign * ratio * static_cast<double>(acc);
  }
  return gamma;
}

MomentTable estimate_moment_table(const EigenSample& sample,
                                  const ClusterAssignment& assignment,
                                  int max_order) {
  MomentTable table;
  table.gamma.reserve(static_cast<std::size_t>(assignment.clusters()));
  for (int i = 0; i < assignment.clusters(); ++i) {
    table.gamma.push_back(
        estimate_cluster_moments(sample, assignment, i, max_order));
    table.source.push_back(MomentTable::Source::residues);
  }
  return table;
}

}  // namespace specest
