#include <benchmark/benchmark.h>

#include "specest/mp_forward.hpp"
#include "specest/pipeline.hpp"
#include "specest/residues.hpp"
#include "specest/simulate.hpp"

namespace {

const specest::DiscretePsd& model() {
  static specest::DiscretePsd psd({1, 7, 15, 25}, {0.5, 0.25, 0.125, 0.125});
  return psd;
}

const specest::EigenSample& sample() {
  static specest::EigenSample s =
      specest::generate_eigen_sample(model(), 320, 1000, 7);
  return s;
}

std::vector<double> boundaries() {
  specest::SupportSet support = specest::support_intervals(model(), 0.32);
  std::vector<double> bounds;
  for (std::size_t i = 0; i + 1 < support.count(); ++i)
    bounds.push_back(
        0.5 * (support.intervals[i].upper + support.intervals[i + 1].lower));
  return bounds;
}

void BM_SupportIntervals(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(specest::support_intervals(model(), 0.32));
}
BENCHMARK(BM_SupportIntervals);

void BM_SolveCompanion(benchmark::State& state) {
  std::complex<double> z(5.0, 1e-9);
  for (auto _ : state)
    benchmark::DoNotOptimize(specest::solve_companion(z, model(), 0.32));
}
BENCHMARK(BM_SolveCompanion);

void BM_GenerateSample(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        specest::generate_eigen_sample(model(), 320, 1000, ++seed));
}
BENCHMARK(BM_GenerateSample);

void BM_TransformZeros(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(specest::zeros_of_companion(sample()));
}
BENCHMARK(BM_TransformZeros);

void BM_MomentTable(benchmark::State& state) {
  specest::ClusterAssignment assignment =
      specest::cluster_eigenvalues(sample(), boundaries());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        specest::estimate_moment_table(sample(), assignment, 3));
}
BENCHMARK(BM_MomentTable);

void BM_LmeEndToEnd(benchmark::State& state) {
  specest::EstimationConfig config;
  config.k = 4;
  config.boundaries = boundaries();
  config.known_weights = {0.5, 0.25, 0.125, 0.125};
  for (auto _ : state)
    benchmark::DoNotOptimize(specest::lme(sample(), config));
}
BENCHMARK(BM_LmeEndToEnd);

void BM_Wasserstein(benchmark::State& state) {
  specest::DiscretePsd other({1.1, 6.9, 15.2, 24.8}, {0.49, 0.26, 0.12, 0.13});
  for (auto _ : state)
    benchmark::DoNotOptimize(specest::wasserstein(model(), other));
}
BENCHMARK(BM_Wasserstein);

}  // namespace

BENCHMARK_MAIN();
