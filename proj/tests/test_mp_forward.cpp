#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "specest/mp_forward.hpp"

using namespace specest;
using Complex = std::complex<double>;

namespace {

const DiscretePsd& fig2_model() {
  static DiscretePsd model({1, 7, 15, 25}, {0.5, 0.25, 0.125, 0.125});
  return model;
}

void check_support(const DiscretePsd& model, double c,
                   const std::vector<std::pair<double, double>>& expected) {
  SupportSet support = support_intervals(model, c);
  REQUIRE(support.count() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(support.intervals[i].lower - expected[i].first) < 1e-3);
    CHECK(std::abs(support.intervals[i].upper - expected[i].second) < 1e-3);
  }
}

}  // namespace

TEST_CASE("companion_z") {
  SUBCASE("hand values") {
    CHECK(companion_z(Complex(-1.0, 0.0), DiscretePsd::delta(2.0), 0.5) ==
          Complex(0.0, 0.0));
    Complex z = companion_z(Complex(0.0, 1.0), DiscretePsd::delta(1.0), 1.0);
    CHECK(z.real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(z.imag() == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("conjugate symmetry") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int rep = 0; rep < 25; ++rep) {
      Complex s(dist(rng), dist(rng));
      if (std::abs(s) < 0.05) continue;
      Complex a = companion_z(s, fig2_model(), 0.32);
      Complex b = companion_z(std::conj(s), fig2_model(), 0.32);
      CHECK(std::abs(b - std::conj(a)) < 1e-12 * (1.0 + std::abs(a)));
    }
  }
  SUBCASE("poles are rejected") {
    CHECK_THROWS_AS(companion_z(Complex(0.0, 0.0), fig2_model(), 0.32),
                    DomainError);
    CHECK_THROWS_AS(companion_z(Complex(-1.0, 0.0), DiscretePsd::delta(1.0), 0.5),
                    DomainError);
  }
}

TEST_CASE("solve_companion") {
  SUBCASE("inverse pair round-trip") {
    Complex s0(-0.2, 0.3);
    Complex z0 = companion_z(s0, fig2_model(), 0.32);
    Complex back = solve_companion(z0, fig2_model(), 0.32);
    CHECK(std::abs(back - s0) < 1e-10);
  }
  SUBCASE("real z above the single-atom support edge") {
    double c = 0.32;
    double edge = (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
    Complex s = solve_companion(Complex(edge + 0.5, 0.0), DiscretePsd::delta(1.0), c);
    CHECK(s.imag() == 0.0);
    CHECK(companion_z_derivative(s, DiscretePsd::delta(1.0), c).real() > 0.0);
  }
  SUBCASE("conjugate symmetry") {
    Complex z(3.0, 0.7);
    Complex a = solve_companion(z, fig2_model(), 0.32);
    Complex b = solve_companion(std::conj(z), fig2_model(), 0.32);
    CHECK(std::abs(b - std::conj(a)) < 1e-10);
  }
  SUBCASE("root-selection invariant off the real axis") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> re(-5.0, 45.0);
    std::uniform_real_distribution<double> im(0.01, 3.0);
    for (int rep = 0; rep < 60; ++rep) {
      Complex z(re(rng), (rep % 2 ? 1 : -1) * im(rng));
      Complex s = solve_companion(z, fig2_model(), 0.32);
      CHECK(z.imag() * s.imag() > 0.0);
      CHECK(std::abs(companion_z(s, fig2_model(), 0.32) - z) < 1e-9);
    }
  }
  SUBCASE("real z inside the support is a domain error") {
    CHECK_THROWS_AS(solve_companion(Complex(1.0, 0.0), fig2_model(), 0.32),
                    DomainError);
  }
}

TEST_CASE("CompanionTransform bundles the maps over one model") {
  CompanionTransform transform(fig2_model(), 0.32);
  Complex s0(-0.2, 0.3);
  Complex z0 = transform.z(s0);
  CHECK(std::abs(transform.s_bar(z0) - s0) < 1e-10);
  CHECK(transform.z_derivative(s0) ==
        companion_z_derivative(s0, fig2_model(), 0.32));
  CHECK(transform.u(2.5) == u_curve(2.5, fig2_model(), 0.32));
  // Stieltjes inversion of s matches the density path.
  Complex z(1.0, 1e-9);
  CHECK(transform.s(z).imag() / M_PI ==
        doctest::Approx(lsd_density(1.0, fig2_model(), 0.32)).epsilon(1e-12));
  // Half-plane rule: Im(z) > 0 maps to Im(s_bar) > 0.
  CHECK(transform.s_bar(Complex(5.0, 0.4)).imag() > 0.0);
  CHECK(transform.s_bar(Complex(5.0, -0.4)).imag() < 0.0);
}

TEST_CASE("support_intervals reproduces the printed endpoint sets") {
  check_support(fig2_model(), 0.32,
                {{0.2615, 1.6935}, {3.2610, 10.1562}, {10.2899, 38.0931}});
  check_support(DiscretePsd({1, 4, 5}, {0.3, 0.4, 0.3}), 0.1,
                {{0.6127, 1.2632}, {2.3484, 7.4137}});
  check_support(DiscretePsd({1, 3, 15, 25}, {0.5, 0.25, 0.125, 0.125}), 0.32,
                {{0.2552, 1.6086}, {1.6609, 4.7592}, {9.1912, 37.6300}});
}

TEST_CASE("support structure") {
  SUBCASE("edges are critical points of z") {
    SupportSet support = support_intervals(fig2_model(), 0.32);
    for (const SupportInterval& interval : support.intervals) {
      for (double s : {interval.s_lower, interval.s_upper}) {
        REQUIRE(std::isfinite(s));
        Complex zp = companion_z_derivative(Complex(s, 0.0), fig2_model(), 0.32);
        CHECK(std::abs(zp) < 1e-8 * (1.0 + 1.0 / (s * s)));
        double h = 1e-6 * std::abs(s);
        Complex z2 = (companion_z_derivative(Complex(s + h, 0.0), fig2_model(), 0.32) -
                      companion_z_derivative(Complex(s - h, 0.0), fig2_model(), 0.32)) /
                     (2.0 * h);
        CHECK(std::abs(z2) > 1e-6);  // curvature does not vanish at the edge
      }
    }
  }
  SUBCASE("contour bounds interleave strictly") {
    SupportSet support = support_intervals(fig2_model(), 0.32);
    double prev = -1e300;
    for (std::size_t i = 0; i < support.count(); ++i) {
      CHECK(support.contour_bounds[i].first > prev);
      CHECK(support.contour_bounds[i].first < support.intervals[i].lower);
      CHECK(support.intervals[i].upper < support.contour_bounds[i].second);
      prev = support.contour_bounds[i].second;
    }
  }
  SUBCASE("shrinking c splits every atom apart") {
    SupportSet support = support_intervals(fig2_model(), 0.01);
    CHECK(support.count() == 4);
  }
  SUBCASE("c >= 1 pushes the first contour bound negative") {
    SupportSet support = support_intervals(DiscretePsd({1, 2}, {0.5, 0.5}), 4.0);
    CHECK(support.contour_bounds[0].first < 0.0);
  }
  SUBCASE("single-atom support matches the closed form") {
    double c = 0.32;
    SupportSet support = support_intervals(DiscretePsd::delta(2.0), c);
    REQUIRE(support.count() == 1);
    double root = std::sqrt(c);
    CHECK(std::abs(support.intervals[0].lower - 2.0 * (1 - root) * (1 - root)) < 1e-6);
    CHECK(std::abs(support.intervals[0].upper - 2.0 * (1 + root) * (1 + root)) < 1e-6);
  }
}

TEST_CASE("lsd_density") {
  const DiscretePsd& model = fig2_model();
  SupportSet support = support_intervals(model, 0.32);

  SUBCASE("vanishes in a gap") {
    CHECK(lsd_density(2.5, model, 0.32) < 1e-6);
  }
  SUBCASE("integrates to one for c < 1") {
    double total = 0.0;
    for (const SupportInterval& interval : support.intervals) {
      int steps = 4000;
      double h = (interval.upper - interval.lower) / steps;
      double acc = 0.5 * (lsd_density(interval.lower + 1e-12, model, 0.32) +
                          lsd_density(interval.upper - 1e-12, model, 0.32));
      for (int i = 1; i < steps; ++i)
        acc += lsd_density(interval.lower + h * i, model, 0.32);
      total += acc * h;
    }
    CHECK(std::abs(total - 1.0) < 1e-3);
  }
  SUBCASE("each interval carries the mass of its divided part") {
    PsdDivision division = divide_psd(model, support);
    for (std::size_t idx = 0; idx < support.count(); ++idx) {
      const SupportInterval& interval = support.intervals[idx];
      int steps = 4000;
      double h = (interval.upper - interval.lower) / steps;
      double acc = 0.5 * (lsd_density(interval.lower + 1e-12, model, 0.32) +
                          lsd_density(interval.upper - 1e-12, model, 0.32));
      for (int i = 1; i < steps; ++i)
        acc += lsd_density(interval.lower + h * i, model, 0.32);
      CHECK(std::abs(acc * h - division.parts[idx].total_mass()) < 1e-2);
    }
  }
  CHECK_THROWS_AS(lsd_density(-1.0, model, 0.32), DomainError);
}

TEST_CASE("u_curve") {
  const DiscretePsd& model = fig2_model();
  SUBCASE("monotone within a gap and separating the atoms") {
    double u_prev = -1e300;
    for (double x : {1.75, 2.0, 2.5, 3.0, 3.2}) {
      double u = u_curve(x, model, 0.32);
      CHECK(u > u_prev);
      CHECK(u > 1.0);
      CHECK(u < 7.0);
      u_prev = u;
    }
  }
  SUBCASE("grows without bound above the support") {
    CHECK(u_curve(1e6, model, 0.32) > 1e5);
  }
  SUBCASE("inside the support is a domain error") {
    CHECK_THROWS_AS(u_curve(1.0, model, 0.32), DomainError);
    CHECK_THROWS_AS(u_curve(0.0, model, 0.32), DomainError);
  }
}

TEST_CASE("divide_psd") {
  SUBCASE("four-atom model with a merged top cluster") {
    SupportSet support = support_intervals(fig2_model(), 0.32);
    PsdDivision division = divide_psd(fig2_model(), support);
    REQUIRE(division.parts.size() == 3);
    CHECK(division.parts[0].atoms() == std::vector<double>{1.0});
    CHECK(division.parts[0].weights() == std::vector<double>{0.5});
    CHECK(division.parts[1].atoms() == std::vector<double>{7.0});
    CHECK(division.parts[1].weights() == std::vector<double>{0.25});
    CHECK(division.parts[2].atoms() == std::vector<double>{15.0, 25.0});
    CHECK(division.parts[2].weights() == std::vector<double>{0.125, 0.125});
  }
  SUBCASE("three intervals for the close-atoms model") {
    DiscretePsd model({1, 3, 15, 25}, {0.5, 0.25, 0.125, 0.125});
    SupportSet support = support_intervals(model, 0.32);
    PsdDivision division = divide_psd(model, support);
    REQUIRE(division.parts.size() == 3);
    CHECK(division.parts[0].atoms() == std::vector<double>{1.0});
    CHECK(division.parts[1].atoms() == std::vector<double>{3.0});
    CHECK(division.parts[2].atoms() == std::vector<double>{15.0, 25.0});
  }
  SUBCASE("single atom is one part") {
    DiscretePsd model = DiscretePsd::delta(1.0);
    PsdDivision division = divide_psd(model, support_intervals(model, 0.7));
    REQUIRE(division.parts.size() == 1);
    CHECK(division.parts[0] == model);
  }
  SUBCASE("parts sum to the whole atomwise") {
    SupportSet support = support_intervals(fig2_model(), 0.32);
    PsdDivision division = divide_psd(fig2_model(), support);
    double mass = 0.0;
    std::size_t atoms = 0;
    for (const DiscretePsd& part : division.parts) {
      mass += part.total_mass();
      atoms += part.size();
    }
    CHECK(atoms == fig2_model().size());
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}
