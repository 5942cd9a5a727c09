#include <doctest.h>

#include <cmath>
#include <random>

#include "specest/partition_search.hpp"

using namespace specest;

namespace {

// Moment table with exact rows for a divided model.
MomentTable exact_table(const std::vector<DiscretePsd>& parts, int max_order) {
  MomentTable table;
  for (const DiscretePsd& part : parts) {
    MomentVector m = moments_of(part, max_order);
    table.gamma.emplace_back(m.values.begin(), m.values.end());
    table.source.push_back(MomentTable::Source::residues);
  }
  return table;
}

}  // namespace

TEST_CASE("g_hat") {
  std::vector<DiscretePsd> parts = {
      DiscretePsd::delta(1.0, 0.5), DiscretePsd::delta(7.0, 0.25),
      DiscretePsd({15.0, 25.0}, {0.125, 0.125})};
  MomentTable table = exact_table(parts, 5);

  SUBCASE("true partition is positive, wrong ones collapse to zero") {
    double g_true = g_hat(table, Partition({1, 1, 2}));
    CHECK(g_true > 0.0);
    double hadamard = 25.0 * 25.0 * 25.0 * 25.0;  // crude row-norm scale
    CHECK(std::abs(g_hat(table, Partition({1, 2, 1}))) < 1e-8 * hadamard);
    CHECK(std::abs(g_hat(table, Partition({2, 1, 1}))) < 1e-8 * hadamard);
    CHECK(g_true > g_hat(table, Partition({1, 2, 1})));
  }
  SUBCASE("single-atom cluster at order 1 is the count fraction") {
    CHECK(g_hat(exact_table({DiscretePsd::delta(2.0, 0.75),
                             DiscretePsd::delta(9.0, 0.25)}, 3),
                Partition({1, 1})) == doctest::Approx(0.25));
  }
  SUBCASE("order above the atom count is not positive definite") {
    MomentTable pair = exact_table({DiscretePsd({15.0, 25.0}, {0.125, 0.125})}, 5);
    CHECK(g_hat(pair, Partition({2})) > 0.0);
    CHECK(g_hat(pair, Partition({3})) < 1e-6);
  }
  SUBCASE("length errors surface") {
    // order 4 needs gamma up to index 6; the table stops at 5
    CHECK_THROWS_AS(g_hat(table, Partition({1, 1, 4})), DomainError);
    CHECK_THROWS_AS(g_hat(table, Partition({1, 1})), DomainError);
  }
}

TEST_CASE("estimate_partition") {
  SUBCASE("recovers the true partition from exact moments") {
    std::vector<DiscretePsd> parts = {
        DiscretePsd::delta(1.0, 0.5), DiscretePsd::delta(7.0, 0.25),
        DiscretePsd({15.0, 25.0}, {0.125, 0.125})};
    PartitionSearchResult result = estimate_partition(exact_table(parts, 3), 4);
    CHECK(result.best.orders == std::vector<int>{1, 1, 2});
    CHECK(result.g > 0.0);
    CHECK_FALSE(result.pruning_fallback);
  }
  SUBCASE("two merged pairs") {
    std::vector<DiscretePsd> parts = {
        DiscretePsd({1.0, 3.0}, {0.5, 0.25}),
        DiscretePsd({15.0, 25.0}, {0.125, 0.125})};
    PartitionSearchResult result = estimate_partition(exact_table(parts, 5), 4);
    CHECK(result.best.orders == std::vector<int>{2, 2});
  }
  SUBCASE("fully split search is a singleton") {
    std::vector<DiscretePsd> parts = {DiscretePsd::delta(1.0, 0.5),
                                      DiscretePsd::delta(7.0, 0.5)};
    PartitionSearchResult result = estimate_partition(exact_table(parts, 1), 2);
    CHECK(result.best.orders == std::vector<int>{1, 1});
    CHECK(result.table.size() == 1);
  }
  SUBCASE("pruning matches the full enumeration") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> noise(-1e-4, 1e-4);
    std::vector<DiscretePsd> parts = {
        DiscretePsd({1.0, 2.0}, {0.3, 0.2}),
        DiscretePsd({6.0, 9.0, 13.0}, {0.2, 0.2, 0.1})};
    for (int k = 5; k <= 6; ++k) {
      for (int rep = 0; rep < 20; ++rep) {
        MomentTable table = exact_table(parts, 2 * (k - 1));
        for (auto& row : table.gamma)
          for (std::size_t l = 1; l < row.size(); ++l)
            row[l] *= 1.0 + noise(rng);
        PartitionSearchResult pruned = estimate_partition(table, k, true);
        PartitionSearchResult full = estimate_partition(table, k, false);
        CHECK(pruned.best == full.best);
      }
    }
  }
  SUBCASE("relabeling clusters relabels the objective consistently") {
    std::vector<DiscretePsd> parts = {
        DiscretePsd::delta(1.0, 0.5),
        DiscretePsd({15.0, 25.0}, {0.125, 0.125})};
    MomentTable table = exact_table(parts, 5);
    MomentTable swapped;
    swapped.gamma = {table.gamma[1], table.gamma[0]};
    swapped.source = table.source;
    CHECK(g_hat(table, Partition({1, 2})) ==
          doctest::Approx(g_hat(swapped, Partition({2, 1}))).epsilon(1e-14));
  }
  SUBCASE("empty pruned set falls back to the full enumeration") {
    // Two singleton clusters but k = 3: every composition needs some k_i = 2,
    // yet both order-2 Hankel matrices are singular, so pruning empties K.
    std::vector<DiscretePsd> parts = {DiscretePsd::delta(2.0, 0.6),
                                      DiscretePsd::delta(8.0, 0.4)};
    PartitionSearchResult result = estimate_partition(exact_table(parts, 4), 3);
    CHECK(result.pruning_fallback);
    CHECK(result.best.total() == 3);
  }
  SUBCASE("argument validation") {
    std::vector<DiscretePsd> parts = {DiscretePsd::delta(1.0)};
    CHECK_THROWS_AS(estimate_partition(exact_table(parts, 3), 0), DomainError);
  }
}
