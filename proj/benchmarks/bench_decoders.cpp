#include <benchmark/benchmark.h>

#include <vector>

#include "gtlab/decode_noiseless.hpp"
#include "gtlab/decode_noisy.hpp"
#include "gtlab/designs.hpp"

namespace {

using namespace gtlab;

struct Instances {
  std::vector<TestMatrix> X;
  std::vector<OutcomeVector> y;
};

// A fixed pool of n = 500, k = 10 instances, so each iteration decodes a
// different but reproducible problem.
Instances make_instances(std::size_t T, const NoiseModel& model, double p) {
  Instances in;
  Rng rng(42);
  for (int r = 0; r < 32; ++r) {
    const DefectiveSet K = sample_defective_set_combinatorial(500, 10, rng);
    in.X.push_back(sample_bernoulli_design(500, T, p, rng));
    in.y.push_back(sample_outcomes(in.X.back(), K, model, rng));
  }
  return in;
}

template <class F>
void run(benchmark::State& state, const Instances& in, F&& decode) {
  std::size_t r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(in.X[r], in.y[r]));
    r = (r + 1) % in.X.size();
  }
}

void BM_Noiseless(benchmark::State& state) {
  const auto id = static_cast<NoiselessDecoder>(state.range(0));
  const auto in = make_instances(static_cast<std::size_t>(state.range(1)), NoiseModel::noiseless(), 1.0 / 11);
  state.SetLabel(to_string(id));
  run(state, in, [&](const TestMatrix& X, const OutcomeVector& y) { return decode_noiseless(id, X, y); });
}
BENCHMARK(BM_Noiseless)
    ->ArgsProduct({{static_cast<int>(NoiselessDecoder::comp), static_cast<int>(NoiselessDecoder::dd),
                    static_cast<int>(NoiselessDecoder::scomp), static_cast<int>(NoiselessDecoder::sss),
                    static_cast<int>(NoiselessDecoder::lp_strict)},
                   {100, 200}});

void BM_NoisyLp(benchmark::State& state) {
  const auto in = make_instances(static_cast<std::size_t>(state.range(0)), NoiseModel::symmetric(0.05), 0.0693);
  run(state, in, [](const TestMatrix& X, const OutcomeVector& y) { return noisy_lp(X, y); });
}
BENCHMARK(BM_NoisyLp)->Arg(200)->Arg(400);

void BM_Bp(benchmark::State& state) {
  const auto in = make_instances(static_cast<std::size_t>(state.range(0)), NoiseModel::symmetric(0.05), 0.0693);
  BpParams params;
  params.model = BpModel::symmetric(0.05);
  params.prior_q = 10.0 / 500;
  run(state, in, [&](const TestMatrix& X, const OutcomeVector& y) { return bp_decode(X, y, params).estimate; });
}
BENCHMARK(BM_Bp)->Arg(200)->Arg(400);

}  // namespace
