#include <benchmark/benchmark.h>

#include "gtlab/designs.hpp"
#include "gtlab/noise.hpp"

namespace {

using namespace gtlab;

void BM_BernoulliDesign(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const double p = 1.0 / static_cast<double>(state.range(1));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_bernoulli_design(500, T, p, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(T) * 500);
}
BENCHMARK(BM_BernoulliDesign)->Args({100, 11})->Args({400, 11})->Args({400, 2})->Args({400, 200});

void BM_NccDesign(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const std::size_t L = ncc_draws(0.6931, T, 10);
  for (auto _ : state) benchmark::DoNotOptimize(sample_ncc_design(500, T, L, rng));
}
BENCHMARK(BM_NccDesign)->Arg(100)->Arg(400);

void BM_NoisyOutcomes(benchmark::State& state) {
  Rng rng(3);
  const TestMatrix X = sample_bernoulli_design(500, 400, 1.0 / 11, rng);
  const DefectiveSet K = sample_defective_set_combinatorial(500, 10, rng);
  const NoiseModel model = NoiseModel::symmetric(0.05);
  for (auto _ : state) benchmark::DoNotOptimize(sample_outcomes(X, K, model, rng));
}
BENCHMARK(BM_NoisyOutcomes);

}  // namespace

BENCHMARK_MAIN();
