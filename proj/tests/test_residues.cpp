#include <doctest.h>

#include <cmath>
#include <random>

#include "specest/contour_oracle.hpp"
#include "specest/residues.hpp"

using namespace specest;

namespace {

EigenSample clustered_sample(std::mt19937& rng, int v, int n) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> lambdas;
  int half = v / 2;
  while (static_cast<int>(lambdas.size()) < half)
    lambdas.push_back(0.8 + 1.2 * dist(rng));
  while (static_cast<int>(lambdas.size()) < v)
    lambdas.push_back(5.0 + 3.0 * dist(rng));
  std::sort(lambdas.begin(), lambdas.end());
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (lambdas[i] - lambdas[i - 1] < 1e-3) lambdas[i] = lambdas[i - 1] + 1e-3;
  return EigenSample(std::move(lambdas), v, n);
}

}  // namespace

TEST_CASE("residue_at_lambda") {
  CHECK(residue_at_lambda(3.7, 1) == -3.7);
  CHECK(residue_at_lambda(3.7, 2) == 0.0);
  CHECK(residue_at_lambda(0.5, 5) == 0.0);
  CHECK_THROWS_AS(residue_at_lambda(1.0, 0), DomainError);
}

TEST_CASE("residue_at_mu closed forms") {
  SUBCASE("order one is the zero itself") {
    std::mt19937 rng(3);
    EigenSample sample = clustered_sample(rng, 12, 40);
    std::vector<double> zeros = zeros_of_companion(sample);
    CHECK(residue_at_mu(zeros[3], sample, 1) == doctest::Approx(zeros[3]));
  }
  SUBCASE("hand-evaluated order two") {
    EigenSample sample({1.0}, 1, 2);
    // s_n'(0.5) = 0.5/0.25 + 0.5/0.25 = 4, so the residue is 1/4.
    CHECK(residue_at_mu(0.5, sample, 2) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("a non-zero abscissa is rejected") {
    EigenSample sample({1.0}, 1, 2);
    CHECK_THROWS_AS(residue_at_mu(0.7, sample, 2), DomainError);
  }
}

TEST_CASE("series residue agrees with the printed closed forms") {
  std::mt19937 rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    EigenSample sample = clustered_sample(rng, 20, 60);
    std::vector<double> zeros = zeros_of_companion(sample);
    for (int idx : {1, 7, 15}) {
      double mu = zeros[static_cast<std::size_t>(idx)];
      for (int l = 1; l <= 5; ++l) {
        double closed = residue_at_mu(mu, sample, l);
        double series = residue_at_mu_series(mu, sample, l);
        CHECK(std::abs(series - closed) <= 1e-12 * (1.0 + std::abs(closed)));
      }
    }
  }
}

TEST_CASE("estimate_cluster_moments") {
  std::mt19937 rng(41);
  EigenSample sample = clustered_sample(rng, 20, 60);
  ClusterAssignment assignment = cluster_eigenvalues(sample, 2);

  SUBCASE("order zero is the count fraction and rows sum to one") {
    MomentTable table = estimate_moment_table(sample, assignment, 3);
    CHECK(table.at(0, 0) == doctest::Approx(0.5));
    CHECK(table.at(0, 0) + table.at(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("first moment expands to the lambda-mu telescoping sum") {
    std::vector<double> gamma = estimate_cluster_moments(sample, assignment, 0, 1);
    double direct = 0.0;
    for (double l : assignment.a_set(0)) direct += l;
    for (double mu : assignment.b_set(0)) direct -= mu;
    direct *= static_cast<double>(sample.n()) / sample.p();
    CHECK(gamma[1] == doctest::Approx(direct).epsilon(1e-12));
    CHECK(gamma[1] >= 0.0);
  }
  SUBCASE("doubling the eigenvalues scales the order-l moment by 2^l") {
    std::vector<double> doubled = sample.lambdas();
    for (double& l : doubled) l *= 2.0;
    EigenSample sample2(std::move(doubled), sample.p(), sample.n());
    ClusterAssignment assignment2 = cluster_eigenvalues(sample2, 2);
    std::vector<double> gamma = estimate_cluster_moments(sample, assignment, 0, 5);
    std::vector<double> gamma2 = estimate_cluster_moments(sample2, assignment2, 0, 5);
    for (int l = 1; l <= 5; ++l)
      CHECK(gamma2[static_cast<std::size_t>(l)] ==
            doctest::Approx(std::pow(2.0, l) * gamma[static_cast<std::size_t>(l)])
                .epsilon(1e-9));
  }
  SUBCASE("missing moments raise a length error") {
    MomentTable table = estimate_moment_table(sample, assignment, 2);
    CHECK_THROWS_AS(table.at(0, 3), DomainError);
  }
}

TEST_CASE("residue sums match the contour quadrature") {
  std::mt19937 rng(53);
  for (int rep = 0; rep < 6; ++rep) {
    EigenSample sample = clustered_sample(rng, 14, 40);
    ClusterAssignment assignment = cluster_eigenvalues(sample, 2);
    auto [first, last] = assignment.range(0);
    std::vector<double> next_b = assignment.b_set(1);
    double below = 0.5 * std::min(assignment.b_set(0).front(),
                                  sample.lambda(static_cast<std::size_t>(first)));
    double above = 0.5 * (sample.lambda(static_cast<std::size_t>(last) - 1) +
                          std::min(next_b.front(),
                                   sample.lambda(static_cast<std::size_t>(last))));
    RectangleContour contour{below, above, 1.0};
    std::vector<double> gamma = estimate_cluster_moments(sample, assignment, 0, 5);
    for (int l = 1; l <= 5; ++l) {
      double oracle = oracle_contour_moment(sample, contour, l);
      CHECK(std::abs(gamma[static_cast<std::size_t>(l)] - oracle) <=
            1e-8 * (1.0 + std::abs(oracle)));
    }
  }
}

TEST_CASE("contour oracle") {
  std::mt19937 rng(67);
  EigenSample sample = clustered_sample(rng, 10, 30);

  SUBCASE("a contour enclosing no poles integrates to zero") {
    double top = sample.lambdas().back();
    RectangleContour contour{top + 5.0, top + 9.0, 1.0};
    CHECK(std::abs(oracle_contour_moment(sample, contour, 1)) < 1e-10);
    CHECK(std::abs(oracle_contour_moment(sample, contour, 3)) < 1e-10);
  }
  SUBCASE("poles within 1e-6 of the contour are rejected") {
    RectangleContour contour{0.1, sample.lambda(3) + 1e-9, 1.0};
    CHECK_THROWS_AS(oracle_contour_moment(sample, contour, 1), NumericalError);
  }
  SUBCASE("population side reproduces exact cluster moments") {
    DiscretePsd model({1, 4, 5}, {0.3, 0.4, 0.3});
    SupportSet support = support_intervals(model, 0.1);
    REQUIRE(support.count() == 2);
    RectangleContour first{support.contour_bounds[0].first,
                           support.contour_bounds[0].second, 1.0};
    CHECK(std::abs(oracle_contour_moment(model, 0.1, first, 1) - 0.3) < 1e-6);
    RectangleContour second{support.contour_bounds[1].first,
                            support.contour_bounds[1].second, 1.0};
    // gamma_{2,1} = 0.4*4 + 0.3*5 and gamma_{2,2} = 0.4*16 + 0.3*25.
    CHECK(std::abs(oracle_contour_moment(model, 0.1, second, 1) - 3.1) < 1e-6);
    CHECK(std::abs(oracle_contour_moment(model, 0.1, second, 2) - 13.9) < 1e-5);
  }
}
