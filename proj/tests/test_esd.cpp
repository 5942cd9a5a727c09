#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "specest/esd.hpp"

using namespace specest;
using Complex = std::complex<double>;

namespace {

// Well-separated synthetic eigenvalues (not from any covariance draw).
EigenSample synthetic_sample(std::mt19937& rng, int v, int n) {
  std::uniform_real_distribution<double> dist(0.5, 10.0);
  std::vector<double> lambdas;
  while (static_cast<int>(lambdas.size()) < v) {
    double candidate = dist(rng);
    bool clear = true;
    for (double l : lambdas)
      if (std::abs(candidate - l) < 0.3) clear = false;
    if (clear) lambdas.push_back(candidate);
  }
  return EigenSample(std::move(lambdas), v, n);
}

}  // namespace

TEST_CASE("EigenSample") {
  SUBCASE("sorts and validates") {
    EigenSample sample({3.0, 1.0, 2.0}, 3, 10);
    CHECK(sample.lambdas() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(sample.v() == 3);
    CHECK(sample.ratio() == doctest::Approx(0.3));
    CHECK_THROWS_AS(EigenSample({1.0, -2.0, 3.0}, 3, 10), DomainError);
    CHECK_THROWS_AS(EigenSample({1.0, 2.0}, 3, 10), DomainError);
  }
  SUBCASE("from_values drops the p - v numerical zeros when p > n") {
    EigenSample sample = EigenSample::from_values({5.0, 1e-14, 2.0, 3e-15}, 4, 2);
    CHECK(sample.v() == 2);
    CHECK(sample.lambdas() == std::vector<double>{2.0, 5.0});
    CHECK_THROWS_AS(EigenSample::from_values({5.0, 0.5, 2.0, 3e-15}, 4, 2),
                    DomainError);
  }
  SUBCASE("reads a one-column file") {
    std::filesystem::path path =
        std::filesystem::temp_directory_path() / "specest_eigs_test.csv";
    {
      std::ofstream out(path);
      out << "# comment\n2.5\n0.5\n1.5\n";
    }
    EigenSample sample = EigenSample::from_csv(path.string(), 3, 9);
    CHECK(sample.lambdas() == std::vector<double>{0.5, 1.5, 2.5});
    std::filesystem::remove(path);
  }
}

TEST_CASE("companion_stieltjes_n") {
  SUBCASE("p = n drops the 1/z term") {
    EigenSample sample({1.0, 2.0, 4.0}, 3, 3);
    Complex z(0.5, 0.5);
    Complex expected = 0.0;
    for (double l : sample.lambdas()) expected += 1.0 / (l - z);
    expected /= 3.0;
    CHECK(std::abs(companion_stieltjes_n(z, sample, 0) - expected) < 1e-14);
  }
  SUBCASE("single eigenvalue hand value") {
    EigenSample sample({1.0}, 1, 1);
    CHECK(companion_stieltjes_n(2.0, sample, 0) == doctest::Approx(-1.0));
  }
  SUBCASE("order-1 matches central differences") {
    EigenSample sample({1.0, 2.0, 4.0}, 3, 10);
    double z = -1.0, h = 1e-5;
    double fd = (companion_stieltjes_n(z + h, sample, 0) -
                 companion_stieltjes_n(z - h, sample, 0)) /
                (2 * h);
    CHECK(std::abs(companion_stieltjes_n(z, sample, 1) - fd) < 1e-6);
  }
  SUBCASE("orders 1..4 match central differences half a unit from the poles") {
    std::mt19937 rng(31);
    EigenSample sample = synthetic_sample(rng, 8, 24);
    for (double z : {sample.lambda(0) - 0.5, sample.lambda(7) + 0.5, -2.0}) {
      double h = 1e-4;
      for (int order = 1; order <= 4; ++order) {
        double fd = (companion_stieltjes_n(z + h, sample, order - 1) -
                     companion_stieltjes_n(z - h, sample, order - 1)) /
                    (2 * h);
        double exact = companion_stieltjes_n(z, sample, order);
        CHECK(std::abs(exact - fd) < 1e-5 * (1.0 + std::abs(exact)));
      }
    }
  }
  SUBCASE("poles are rejected") {
    EigenSample sample({1.0, 2.0}, 2, 8);
    CHECK_THROWS_AS(companion_stieltjes_n(0.0, sample, 0), DomainError);
    CHECK_THROWS_AS(companion_stieltjes_n(1.0, sample, 0), DomainError);
  }
}

TEST_CASE("zeros_of_companion") {
  SUBCASE("closed-form one-eigenvalue case") {
    EigenSample sample({1.0}, 1, 2);
    std::vector<double> zeros = zeros_of_companion(sample);
    REQUIRE(zeros.size() == 1);
    CHECK(zeros[0] == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("interlacing and the defining property") {
    std::mt19937 rng(47);
    for (int rep = 0; rep < 10; ++rep) {
      EigenSample sample = synthetic_sample(rng, 10, 30);
      std::vector<double> zeros = zeros_of_companion(sample);
      REQUIRE(zeros.size() == 10);
      for (int i = 0; i < 10; ++i) {
        CHECK(zeros[static_cast<std::size_t>(i)] < sample.lambda(static_cast<std::size_t>(i)));
        if (i > 0)
          CHECK(zeros[static_cast<std::size_t>(i)] > sample.lambda(static_cast<std::size_t>(i - 1)));
        CHECK(std::abs(companion_stieltjes_n(zeros[static_cast<std::size_t>(i)], sample, 0)) <
              1e-10);
      }
    }
  }
  SUBCASE("p = n pins the first zero at the origin") {
    EigenSample sample({0.5, 1.5, 3.0}, 3, 3);
    std::vector<double> zeros = zeros_of_companion(sample);
    CHECK(zeros[0] == 0.0);
    CHECK(zeros[1] > 0.5);
  }
  SUBCASE("repeated eigenvalues are jittered and logged") {
    EigenSample sample({1.0, 1.0, 3.0}, 3, 9);
    std::vector<std::string> log;
    std::vector<double> zeros = zeros_of_companion(sample, &log);
    CHECK(zeros.size() == 3);
    CHECK(log.size() == 1);
    for (std::size_t i = 1; i < zeros.size(); ++i) CHECK(zeros[i] > zeros[i - 1]);
  }
}

TEST_CASE("cluster_eigenvalues") {
  SUBCASE("largest gap wins") {
    EigenSample sample({1.0, 1.1, 5.0, 5.2}, 4, 12);
    ClusterAssignment assignment = cluster_eigenvalues(sample, 2);
    CHECK(assignment.a_set(0) == std::vector<double>{1.0, 1.1});
    CHECK(assignment.a_set(1) == std::vector<double>{5.0, 5.2});
    CHECK(assignment.count(0) == 2);
  }
  SUBCASE("m = 1 keeps everything together") {
    EigenSample sample({1.0, 1.1, 5.0, 5.2}, 4, 12);
    ClusterAssignment assignment = cluster_eigenvalues(sample, 1);
    CHECK(assignment.clusters() == 1);
    CHECK(assignment.count(0) == 4);
  }
  SUBCASE("boundary splitting and the tie error") {
    EigenSample sample({1.0, 2.0, 3.0, 4.0}, 4, 12);
    ClusterAssignment assignment =
        cluster_eigenvalues(sample, std::vector<double>{2.5});
    CHECK(assignment.count(0) == 2);
    CHECK(assignment.count(1) == 2);
    CHECK_THROWS_AS(cluster_eigenvalues(sample, std::vector<double>{2.0}),
                    DomainError);
    CHECK_THROWS_AS(cluster_eigenvalues(sample, std::vector<double>{9.0}),
                    DomainError);
  }
  SUBCASE("b sets exclude a zero at the origin") {
    EigenSample sample({0.5, 1.5, 3.0}, 3, 3);  // p = n
    ClusterAssignment assignment = cluster_eigenvalues(sample, 1);
    CHECK(assignment.b_set(0).size() == 2);
    CHECK(assignment.a_set(0).size() == 3);
  }
  SUBCASE("explicit sizes") {
    EigenSample sample({1.0, 2.0, 3.0, 4.0}, 4, 12);
    ClusterAssignment assignment = cluster_by_sizes(sample, {3, 1});
    CHECK(assignment.count(0) == 3);
    CHECK(assignment.count(1) == 1);
    CHECK_THROWS_AS(cluster_by_sizes(sample, {2, 1}), DomainError);
  }
  SUBCASE("merge plans") {
    EigenSample sample({1.0, 2.0, 5.0, 9.0}, 4, 12);
    ClusterAssignment assignment = cluster_by_sizes(sample, {1, 1, 2});
    ClusterAssignment merged = assignment.merged({{0, 1}, {2}});
    CHECK(merged.clusters() == 2);
    CHECK(merged.count(0) == 2);
    ClusterAssignment pair = assignment.merged_pair(1, 2);
    CHECK(pair.clusters() == 2);
    CHECK(pair.count(1) == 3);
    CHECK_THROWS_AS(assignment.merged({{0, 2}, {1}}), DomainError);
    CHECK_THROWS_AS(assignment.merged({{0, 1}}), DomainError);
  }
}
