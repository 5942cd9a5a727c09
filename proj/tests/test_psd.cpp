#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "specest/psd.hpp"

using namespace specest;

namespace {

DiscretePsd random_psd(std::mt19937& rng, int k, double lo = 0.5,
                       double hi = 30.0, double min_gap = 1.0) {
  std::uniform_real_distribution<double> atom_dist(lo, hi);
  std::uniform_real_distribution<double> weight_dist(0.1, 1.0);
  std::vector<double> atoms;
  while (static_cast<int>(atoms.size()) < k) {
    double candidate = atom_dist(rng);
    bool clear = true;
    for (double a : atoms)
      if (std::abs(candidate - a) < min_gap) clear = false;
    if (clear) atoms.push_back(candidate);
  }
  std::vector<double> weights;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    weights.push_back(weight_dist(rng));
    total += weights.back();
  }
  for (double& w : weights) w /= total;
  return DiscretePsd(atoms, weights);
}

}  // namespace

TEST_CASE("DiscretePsd construction") {
  SUBCASE("sorts atoms and carries weights along") {
    DiscretePsd psd({7.0, 1.0, 25.0}, {0.25, 0.5, 0.25});
    CHECK(psd.atoms() == std::vector<double>{1.0, 7.0, 25.0});
    CHECK(psd.weights() == std::vector<double>{0.5, 0.25, 0.25});
    CHECK(psd.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("rejects bad input") {
    CHECK_THROWS_AS(DiscretePsd({0.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(DiscretePsd({-1.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(DiscretePsd({1.0, 1.0 + 1e-12}, {0.5, 0.5}), DomainError);
    CHECK_THROWS_AS(DiscretePsd({1.0, 2.0}, {0.5, -0.5}), DomainError);
    CHECK_THROWS_AS(DiscretePsd({1.0}, {0.5, 0.5}), DomainError);
    CHECK_THROWS_AS(DiscretePsd({}, {}), DomainError);
  }
  SUBCASE("sub-measures keep their partial mass") {
    DiscretePsd part({15.0, 25.0}, {0.125, 0.125});
    CHECK(part.total_mass() == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("DiscretePsd text record round-trip") {
  DiscretePsd psd({1.0, 7.0, 15.0, 25.0}, {0.5, 0.25, 0.125, 0.125});
  DiscretePsd back = DiscretePsd::from_record_string(psd.to_record());
  CHECK(back == psd);

  SUBCASE("header mass is validated") {
    std::string bad = "# total_mass=0.9\n1,0.5\n2,0.5\n";
    CHECK_THROWS_AS(DiscretePsd::from_record_string(bad), DomainError);
  }
  SUBCASE("random instances survive the round trip") {
    std::mt19937 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
      DiscretePsd g = random_psd(rng, 1 + rep % 5);
      CHECK(DiscretePsd::from_record_string(g.to_record()) == g);
    }
  }
}

TEST_CASE("moments_of") {
  SUBCASE("point mass at 1") {
    MomentVector m = moments_of(DiscretePsd::delta(1.0), 3);
    CHECK(m.values == std::vector<long double>{1.0L, 1.0L, 1.0L, 1.0L});
    CHECK(m.origin == MomentOrigin::exact);
  }
  SUBCASE("two-atom sub-measure") {
    MomentVector m = moments_of(DiscretePsd({15.0, 25.0}, {0.125, 0.125}), 1);
    CHECK(m[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m[1] == doctest::Approx(5.0).epsilon(1e-14));
  }
  SUBCASE("four-atom model first moment") {
    DiscretePsd psd({1, 7, 15, 25}, {0.5, 0.25, 0.125, 0.125});
    MomentVector m = moments_of(psd, 1);
    CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m[1] == doctest::Approx(7.25).epsilon(1e-14));
  }
  SUBCASE("gamma_0 equals the total mass and exact values match the sum") {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 25; ++rep) {
      DiscretePsd g = random_psd(rng, 1 + rep % 5);
      MomentVector m = moments_of(g, 8);
      CHECK(m[0] == doctest::Approx(g.total_mass()).epsilon(1e-12));
      for (int l = 0; l <= 8; ++l) {
        long double direct = 0.0L;
        for (std::size_t i = 0; i < g.size(); ++i)
          direct += g.weight(i) * std::pow(static_cast<long double>(g.atom(i)), l);
        CHECK(m[static_cast<std::size_t>(l)] ==
              doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(moments_of(DiscretePsd::delta(1.0), -1), DomainError);
}

TEST_CASE("hankel") {
  SUBCASE("point-mass moments give the all-ones matrix") {
    HankelMatrix h = hankel(MomentVector{{1.0, 1.0, 1.0}}, 2);
    CHECK(h(0, 0) == 1.0);
    CHECK(h(0, 1) == 1.0);
    CHECK(h(1, 0) == 1.0);
    CHECK(h(1, 1) == 1.0);
  }
  SUBCASE("two-atom measure") {
    HankelMatrix h = hankel(moments_of(DiscretePsd({1, 2}, {0.5, 0.5}), 2), 2);
    CHECK(h(0, 0) == doctest::Approx(1.0));
    CHECK(h(0, 1) == doctest::Approx(1.5));
    CHECK(h(1, 0) == doctest::Approx(1.5));
    CHECK(h(1, 1) == doctest::Approx(2.5));
  }
  SUBCASE("identity from (1,0,1)") {
    HankelMatrix h = hankel(MomentVector{{1.0, 0.0, 1.0}}, 2);
    CHECK(h(0, 1) == 0.0);
    CHECK(h(1, 1) == 1.0);
  }
  SUBCASE("insufficient moments") {
    CHECK_THROWS_AS(hankel(MomentVector{{1.0, 1.0}}, 2), DomainError);
  }
  SUBCASE("symmetry is exact by construction") {
    std::mt19937 rng(7);
    DiscretePsd g = random_psd(rng, 4);
    HankelMatrix h = hankel(moments_of(g, 6), 4);
    for (int r = 0; r < 4; ++r)
      for (int s = 0; s < 4; ++s) CHECK(h(r, s) == h(s, r));
  }
}

TEST_CASE("hankel positivity boundary at the atom count") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    int k = 1 + rep % 4;
    DiscretePsd g = random_psd(rng, k);
    MomentVector m = moments_of(g, 2 * k);
    CHECK(hankel(m, k).min_eigenvalue() > 0.0);
    HankelMatrix above = hankel(m, k + 1);
    // Hadamard bound keeps the singularity check scale-invariant.
    double hadamard = 1.0;
    for (int r = 0; r <= k; ++r) hadamard *= above.matrix().row(r).norm();
    CHECK(std::abs(above.determinant()) < 1e-8 * hadamard);
  }
}

TEST_CASE("hankel determinant identity") {
  SUBCASE("half-and-half on 1 and 2") {
    auto [direct, formula] = hankel_det_identity_check(DiscretePsd({1, 2}, {0.5, 0.5}));
    CHECK(direct == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(formula == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("single atom: weight times empty product") {
    auto [direct, formula] = hankel_det_identity_check(DiscretePsd::delta(3.0));
    CHECK(direct == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(formula == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("three atoms") {
    auto [direct, formula] =
        hankel_det_identity_check(DiscretePsd({1, 4, 5}, {0.3, 0.4, 0.3}));
    CHECK(formula == doctest::Approx(5.184).epsilon(1e-12));
    CHECK(direct == doctest::Approx(5.184).epsilon(1e-10));
  }
  SUBCASE("100 random instances agree to 1e-10 relative") {
    std::mt19937 rng(99);
    for (int rep = 0; rep < 100; ++rep) {
      DiscretePsd g = random_psd(rng, 1 + rep % 4);
      auto [direct, formula] = hankel_det_identity_check(g);
      CHECK(std::abs(direct - formula) <= 1e-10 * std::abs(formula));
    }
  }
}

TEST_CASE("enumerate_partitions") {
  SUBCASE("k=4, m=3") {
    std::vector<Partition> parts = enumerate_partitions(4, 3);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].orders == std::vector<int>{1, 1, 2});
    CHECK(parts[1].orders == std::vector<int>{1, 2, 1});
    CHECK(parts[2].orders == std::vector<int>{2, 1, 1});
  }
  SUBCASE("k=2, m=2") {
    std::vector<Partition> parts = enumerate_partitions(2, 2);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].orders == std::vector<int>{1, 1});
  }
  SUBCASE("k=4, m=2") {
    std::vector<Partition> parts = enumerate_partitions(4, 2);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].orders == std::vector<int>{1, 3});
    CHECK(parts[1].orders == std::vector<int>{2, 2});
    CHECK(parts[2].orders == std::vector<int>{3, 1});
  }
  SUBCASE("m > k is rejected") {
    CHECK_THROWS_AS(enumerate_partitions(2, 3), DomainError);
  }
  SUBCASE("cardinality is C(k-1, m-1)") {
    auto binom = [](int n, int r) {
      long long acc = 1;
      for (int i = 0; i < r; ++i) acc = acc * (n - i) / (i + 1);
      return acc;
    };
    for (int k = 1; k <= 8; ++k)
      for (int m = 1; m <= k; ++m)
        CHECK(static_cast<long long>(enumerate_partitions(k, m).size()) ==
              binom(k - 1, m - 1));
  }
}
