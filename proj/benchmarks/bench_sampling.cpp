#include <benchmark/benchmark.h>

#include <numbers>

#include "polar_tails/rng.hpp"
#include "polar_tails/sampling.hpp"

using namespace polar;

static void BM_Philox(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rng::uniform_pair(1, 0, i++));
}
BENCHMARK(BM_Philox);

static void BM_SamplePolar(benchmark::State& state) {
  const PolarModel m(RadialModel::kotz({1, 0, 1, 1}), AngularModel::dirichlet({1, 1, std::numbers::pi}), 0.3);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    SampleBatch b = sample_polar(m, n, 1, 0, 1);
    benchmark::DoNotOptimize(b.pairs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePolar)->Arg(10'000)->Arg(100'000);

static void BM_EmpiricalConditionalCdf(benchmark::State& state) {
  const PolarModel m(RadialModel::chi2df(), AngularModel::uniform(), 0.5);
  const SampleBatch b = sample_polar(m, 1'000'000, 1);
  std::vector<double> ys;
  for (double y = -1.0; y <= 4.0; y += 0.1) ys.push_back(y);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_conditional_cdf(b.pairs, 2.3263478740408408, ys));
}
BENCHMARK(BM_EmpiricalConditionalCdf);
