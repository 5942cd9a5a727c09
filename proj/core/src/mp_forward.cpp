#include "specest/mp_forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specest/polyroots.hpp"

namespace specest {

namespace {

using Complex = std::complex<double>;

constexpr double kPoleTol = 1e-13;

void check_ratio(double c) {
  if (!(c > 0.0)) throw DomainError("dimension ratio c must be positive");
}

double z_real(double s, const DiscretePsd& H, double c) {
  double acc = -1.0 / s;
  for (std::size_t j = 0; j < H.size(); ++j) {
    double a = H.atom(j);
    acc += c * H.weight(j) * a / (1.0 + a * s);
  }
  return acc;
}

double z_prime_real(double s, const DiscretePsd& H, double c) {
  double acc = 1.0 / (s * s);
  for (std::size_t j = 0; j < H.size(); ++j) {
    double a = H.atom(j);
    double d = 1.0 + a * s;
    acc -= c * H.weight(j) * a * a / (d * d);
  }
  return acc;
}

double z_second_real(double s, const DiscretePsd& H, double c) {
  double acc = -2.0 / (s * s * s);
  for (std::size_t j = 0; j < H.size(); ++j) {
    double a = H.atom(j);
    double d = 1.0 + a * s;
    acc += 2.0 * c * H.weight(j) * a * a * a / (d * d * d);
  }
  return acc;
}

// Multiplies poly by (1 + a s); coefficients ascending in s.
void multiply_linear(std::vector<double>& poly, double a) {
  poly.push_back(0.0);
  for (std::size_t i = poly.size() - 1; i > 0; --i) poly[i] += a * poly[i - 1];
}

struct CriticalPoint {
  double s = 0.0;
  double x = 0.0;
  double curvature = 0.0;  // z''(s)
};

// Bisection for a sign change of z' on [lo, hi], then a few Newton steps on
// z' to polish. Caller guarantees sign(z'(lo)) != sign(z'(hi)).
CriticalPoint refine_critical(double lo, double hi, double flo,
                              const DiscretePsd& H, double c) {
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * std::max({std::abs(lo), std::abs(hi), 1e-300})) break;
    double fmid = z_prime_real(mid, H, c);
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 3; ++iter) {
    double zp = z_prime_real(s, H, c);
    double zpp = z_second_real(s, H, c);
    if (zpp == 0.0) break;
    double next = s - zp / zpp;
    if (next <= lo || next >= hi) break;
    s = next;
  }
  CriticalPoint out;
  out.s = s;
  out.x = z_real(s, H, c);
  out.curvature = z_second_real(s, H, c);
  return out;
}

// Scans z' over ascending probe abscissas and refines every sign change.
void scan_probes(const std::vector<double>& probes, const DiscretePsd& H,
                 double c, std::vector<CriticalPoint>& out) {
  if (probes.size() < 2) return;
  double prev = probes.front();
  double fprev = z_prime_real(prev, H, c);
  for (std::size_t i = 1; i < probes.size(); ++i) {
    double cur = probes[i];
    double fcur = z_prime_real(cur, H, c);
    if (std::isfinite(fprev) && std::isfinite(fcur) &&
        (fprev > 0) != (fcur > 0)) {
      out.push_back(refine_critical(prev, cur, fprev, H, c));
    }
    prev = cur;
    fprev = fcur;
  }
}

// 512 probes per gap, log-spaced toward both endpoints.
std::vector<double> two_sided_probes(double lo, double hi) {
  constexpr int kHalf = 256;
  std::vector<double> probes;
  probes.reserve(2 * kHalf);
  double width = hi - lo;
  double lmin = std::log(1e-11);
  double lmax = std::log(0.5);
  for (int i = 0; i < kHalf; ++i) {
    double t = std::exp(lmin + (lmax - lmin) * i / (kHalf - 1));
    probes.push_back(lo + width * t);
    probes.push_back(hi - width * t);
  }
  std::sort(probes.begin(), probes.end());
  return probes;
}

std::vector<double> one_sided_probes(double anchor, double d_min, double d_max,
                                     bool ascending) {
  constexpr int kCount = 512;
  std::vector<double> probes;
  probes.reserve(kCount);
  double lmin = std::log(d_min);
  double lmax = std::log(d_max);
  for (int i = 0; i < kCount; ++i) {
    double d = std::exp(lmin + (lmax - lmin) * i / (kCount - 1));
    probes.push_back(ascending ? anchor + d : anchor - d);
  }
  std::sort(probes.begin(), probes.end());
  return probes;
}

}  // namespace

CompanionTransform::CompanionTransform(DiscretePsd H, double c)
    : model_(std::move(H)), c_(c) {
  check_ratio(c_);
}

Complex CompanionTransform::z(Complex s) const {
  return companion_z(s, model_, c_);
}

Complex CompanionTransform::z_derivative(Complex s) const {
  return companion_z_derivative(s, model_, c_);
}

Complex CompanionTransform::s_bar(Complex z) const {
  return solve_companion(z, model_, c_);
}

Complex CompanionTransform::s(Complex z) const {
  return (s_bar(z) + (1.0 - c_) / z) / c_;
}

double CompanionTransform::u(double x) const { return u_curve(x, model_, c_); }

Complex companion_z(Complex s, const DiscretePsd& H, double c) {
  check_ratio(c);
  if (std::abs(s) < kPoleTol)
    throw DomainError("companion_z: evaluation at the pole s = 0");
  Complex acc = -1.0 / s;
  for (std::size_t j = 0; j < H.size(); ++j) {
    double a = H.atom(j);
    Complex d = 1.0 + a * s;
    if (std::abs(d) < kPoleTol * (1.0 + std::abs(a * s)))
      throw DomainError("companion_z: evaluation at the pole s = -1/" +
                        std::to_string(a));
    acc += c * H.weight(j) * a / d;
  }
  return acc;
}

Complex companion_z_derivative(Complex s, const DiscretePsd& H, double c) {
  check_ratio(c);
  if (std::abs(s) < kPoleTol)
    throw DomainError("companion_z_derivative: evaluation at the pole s = 0");
  Complex acc = 1.0 / (s * s);
  for (std::size_t j = 0; j < H.size(); ++j) {
    double a = H.atom(j);
    Complex d = 1.0 + a * s;
    if (std::abs(d) < kPoleTol * (1.0 + std::abs(a * s)))
      throw DomainError("companion_z_derivative: evaluation at a pole");
    acc -= c * H.weight(j) * a * a / (d * d);
  }
  return acc;
}

Complex solve_companion(Complex z, const DiscretePsd& H, double c) {
  check_ratio(c);
  if (std::abs(z) == 0.0)
    throw DomainError("solve_companion: z = 0 is excluded");

  // Clear denominators: z s Q(s) + Q(s) - c s R(s) = 0 with
  // Q = prod_j (1 + a_j s) and R = sum_j w_j a_j prod_{l != j} (1 + a_l s).
  std::size_t k = H.size();
  std::vector<double> q{1.0};
  for (std::size_t j = 0; j < k; ++j) multiply_linear(q, H.atom(j));
  std::vector<double> r(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> qj{1.0};
    for (std::size_t l = 0; l < k; ++l)
      if (l != j) multiply_linear(qj, H.atom(l));
    for (std::size_t i = 0; i < qj.size(); ++i)
      r[i] += H.weight(j) * H.atom(j) * qj[i];
  }

  std::vector<Complex> poly(k + 2, Complex(0.0));
  for (std::size_t i = 0; i < q.size(); ++i) {
    poly[i] += q[i];        // + Q
    poly[i + 1] += z * q[i];  // + z s Q
  }
  for (std::size_t i = 0; i < r.size(); ++i) poly[i + 1] -= c * r[i];  // - c s R

  std::vector<Complex> roots = polynomial_roots(poly);
  if (roots.empty()) throw NumericalError("solve_companion: no roots found");

  auto polish = [&](Complex s) {
    Complex best = s;
    double best_res = std::abs(companion_z(best, H, c) - z);
    for (int iter = 0; iter < 4; ++iter) {
      Complex zp = companion_z_derivative(s, H, c);
      if (std::abs(zp) == 0.0) break;
      s -= (companion_z(s, H, c) - z) / zp;
      double res = std::abs(companion_z(s, H, c) - z);
      if (res < best_res) {
        best = s;
        best_res = res;
      } else {
        break;
      }
    }
    return best;
  };

  // Root noise can outweigh a vanishing Im(z); snap such z to the real branch
  // when it applies (real z outside the support), falling through otherwise.
  bool near_axis = std::abs(z.imag()) <= 1e-13 * (1.0 + std::abs(z.real()));

  if (z.imag() != 0.0 && !near_axis) {
    // Unique admissible root: Im(z) and Im(s) share a sign.
    double sign = z.imag() > 0 ? 1.0 : -1.0;
    Complex best = roots.front();
    for (const Complex& root : roots)
      if (sign * root.imag() > sign * best.imag()) best = root;
    if (!(sign * best.imag() > 0.0))
      throw NumericalError(
          "solve_companion: no root in the admissible half-plane");
    return polish(best);
  }

  // Real z outside the support: the real root with z'(s) > 0.
  std::vector<double> admissible;
  for (const Complex& root : roots) {
    if (std::abs(root.imag()) > 1e-8 * (1.0 + std::abs(root.real()))) continue;
    double s = root.real();
    double zp;
    try {
      zp = z_prime_real(s, H, c);
    } catch (const DomainError&) {
      continue;
    }
    if (!(zp > 0.0)) continue;
    bool duplicate = false;
    for (double seen : admissible)
      if (std::abs(seen - s) <= 1e-9 * (1.0 + std::abs(s))) duplicate = true;
    if (!duplicate) admissible.push_back(s);
  }
  if (admissible.empty()) {
    if (z.imag() != 0.0) {
      // Near-axis z over the support: fall back to half-plane selection.
      double sign = z.imag() > 0 ? 1.0 : -1.0;
      Complex best = roots.front();
      for (const Complex& root : roots)
        if (sign * root.imag() > sign * best.imag()) best = root;
      if (sign * best.imag() > 0.0) return polish(best);
    }
    throw DomainError(
        "solve_companion: no real root with z'(s) > 0; real z lies inside "
        "the support");
  }
  if (admissible.size() > 1)
    throw NumericalError(
        "solve_companion: multiple real roots with z'(s) > 0 at z = " +
        std::to_string(z.real()));
  return polish(Complex(admissible.front(), 0.0));
}

SupportSet support_intervals(const DiscretePsd& H, double c) {
  check_ratio(c);
  if (std::abs(H.total_mass() - 1.0) > 1e-9)
    throw DomainError("support_intervals: H must be a full distribution");

  std::size_t k = H.size();
  std::vector<CriticalPoint> critical;

  // Leftmost gap s in (-inf, -1/a_k ... -1/a_1): probed as u = -1/s in (0, a_1).
  {
    std::vector<double> uprobes = two_sided_probes(0.0, H.atom(0));
    std::vector<double> probes;
    probes.reserve(uprobes.size());
    for (double u : uprobes) probes.push_back(-1.0 / u);
    std::sort(probes.begin(), probes.end());
    scan_probes(probes, H, c, critical);
  }
  // Gaps between consecutive poles -1/a_j < -1/a_{j+1}.
  for (std::size_t j = 0; j + 1 < k; ++j) {
    std::vector<double> probes =
        two_sided_probes(-1.0 / H.atom(j), -1.0 / H.atom(j + 1));
    scan_probes(probes, H, c, critical);
  }
  // Gap (-1/a_k, 0): probed as u in (a_k, inf); the critical u stays below
  // the largest support edge, so a (1 + sqrt(c))^2-scaled cap is generous.
  {
    double a_max = H.atom(k - 1);
    double span = a_max * (4.0 * (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c)) + 4.0);
    std::vector<double> uprobes =
        one_sided_probes(a_max, a_max * 1e-11, span, true);
    std::vector<double> probes;
    for (double u : uprobes) probes.push_back(-1.0 / u);
    std::sort(probes.begin(), probes.end());
    scan_probes(probes, H, c, critical);
  }
  // s > 0 carries the lower edge when c > 1.
  if (c >= 1.0) {
    std::vector<double> probes =
        one_sided_probes(0.0, 1e-9 / H.atom(k - 1), 1e9 / H.atom(0), true);
    scan_probes(probes, H, c, critical);
  }

  std::sort(critical.begin(), critical.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.x < b.x; });

  // c = 1 exactly: the lower edge sits at 0 and is not a critical value.
  if (critical.size() % 2 == 1 && std::abs(c - 1.0) < 1e-9) {
    CriticalPoint origin;
    origin.s = -std::numeric_limits<double>::infinity();
    origin.x = 0.0;
    origin.curvature = -1.0;
    critical.insert(critical.begin(), origin);
  }

  if (critical.size() < 2 || critical.size() % 2 != 0) {
    std::ostringstream msg;
    msg << "support_intervals: found " << critical.size()
        << " critical values; cannot assemble edge pairs (";
    for (const auto& cp : critical) msg << " " << cp.x;
    msg << " )";
    throw NumericalError(msg.str());
  }

  // Edges alternate: local maximum (left edge), local minimum (right edge).
  // Near-coincident values may sort in the wrong order; swap them first.
  double scale = critical.back().x;
  for (std::size_t i = 0; i + 1 < critical.size(); ++i) {
    bool want_max = (i % 2 == 0);
    if ((critical[i].curvature < 0.0) != want_max &&
        std::abs(critical[i + 1].x - critical[i].x) <= 1e-9 * std::abs(scale))
      std::swap(critical[i], critical[i + 1]);
  }
  for (std::size_t i = 0; i < critical.size(); ++i) {
    bool want_max = (i % 2 == 0);
    if ((critical[i].curvature < 0.0) != want_max)
      throw NumericalError(
          "support_intervals: critical values do not alternate between local "
          "maxima and minima near x = " +
          std::to_string(critical[i].x));
  }

  SupportSet support;
  support.ratio_c = c;
  for (std::size_t i = 0; i < critical.size(); i += 2) {
    SupportInterval interval;
    interval.lower = critical[i].x;
    interval.upper = critical[i + 1].x;
    interval.s_lower = critical[i].s;
    interval.s_upper = critical[i + 1].s;
    support.intervals.push_back(interval);
  }

  // Merge near-degenerate splits (gap below 1e-6 of the spectral scale).
  double merge_tol = 1e-6 * support.intervals.back().upper;
  for (std::size_t i = 0; i + 1 < support.intervals.size();) {
    if (support.intervals[i + 1].lower - support.intervals[i].upper < merge_tol) {
      support.intervals[i].upper = support.intervals[i + 1].upper;
      support.intervals[i].s_upper = support.intervals[i + 1].s_upper;
      support.intervals.erase(support.intervals.begin() +
                              static_cast<std::ptrdiff_t>(i) + 1);
      support.merged_near_degenerate = true;
    } else {
      ++i;
    }
  }

  // Contour bounds: thirds of each inter-cluster gap keep the chain strict
  // with equal clearance on both sides.
  std::size_t m = support.intervals.size();
  support.contour_bounds.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double lo, hi;
    if (i == 0) {
      lo = c < 1.0 ? support.intervals[0].lower / 2.0
                   : -std::max(1.0, support.intervals[0].lower);
    } else {
      double gap = support.intervals[i].lower - support.intervals[i - 1].upper;
      lo = support.intervals[i - 1].upper + 2.0 * gap / 3.0;
    }
    if (i + 1 == m) {
      hi = support.intervals[i].upper +
           (support.intervals[i].upper - support.intervals[i].lower) / 2.0;
    } else {
      double gap = support.intervals[i + 1].lower - support.intervals[i].upper;
      hi = support.intervals[i].upper + gap / 3.0;
    }
    support.contour_bounds[i] = {lo, hi};
  }
  return support;
}

double lsd_density(double x, const DiscretePsd& H, double c) {
  if (!(x > 0.0)) throw DomainError("lsd_density: x must be positive");
  constexpr double kEps = 1e-9;
  Complex z(x, kEps);
  Complex s_bar = solve_companion(z, H, c);
  Complex s = (s_bar + (1.0 - c) / z) / c;
  return s.imag() / M_PI;
}

double u_curve(double x, const DiscretePsd& H, double c) {
  if (x == 0.0) throw DomainError("u_curve: x = 0 is excluded");
  Complex s_bar = solve_companion(Complex(x, 0.0), H, c);
  return -1.0 / s_bar.real();
}

PsdDivision divide_psd(const DiscretePsd& H, const SupportSet& support) {
  if (support.intervals.empty())
    throw DomainError("divide_psd: empty support");
  double c = support.ratio_c;

  PsdDivision division;
  division.u_bounds.reserve(support.count());
  for (const auto& [lo, hi] : support.contour_bounds)
    division.u_bounds.emplace_back(u_curve(lo, H, c), u_curve(hi, H, c));

  std::vector<std::vector<double>> atoms(support.count());
  std::vector<std::vector<double>> weights(support.count());
  for (std::size_t j = 0; j < H.size(); ++j) {
    double a = H.atom(j);
    bool placed = false;
    for (std::size_t i = 0; i < division.u_bounds.size(); ++i) {
      if (a >= division.u_bounds[i].first && a <= division.u_bounds[i].second) {
        atoms[i].push_back(a);
        weights[i].push_back(H.weight(j));
        placed = true;
        break;
      }
    }
    if (!placed)
      throw NumericalError("divide_psd: atom " + std::to_string(a) +
                           " falls in no u-bracket");
  }
  for (std::size_t i = 0; i < support.count(); ++i) {
    if (atoms[i].empty())
      throw NumericalError("divide_psd: support interval " + std::to_string(i) +
                           " received no atoms");
    division.parts.emplace_back(std::move(atoms[i]), std::move(weights[i]));
  }
  return division;
}

}  // namespace specest
