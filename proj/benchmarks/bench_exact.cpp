#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "polar_tails/asymptotics.hpp"
#include "polar_tails/polar_exact.hpp"

using namespace polar;

namespace {

PolarModel model_for(int which) {
  switch (which) {
    case 0:
      return {RadialModel::chi2df(), AngularModel::uniform(), 0.5};
    case 1:
      return {RadialModel::kotz({1, 0, 1, 1}), AngularModel::dirichlet({1, 1, std::numbers::pi}), 0.3};
    default:
      return {RadialModel::kotz({1, 1, 0.5, 2}), AngularModel::power(1.5, 1.0), -0.2};
  }
}

}  // namespace

static void BM_JIntegralTilde(benchmark::State& state) {
  const PolarModel m = model_for(static_cast<int>(state.range(0)));
  const double inf = std::numeric_limits<double>::infinity();
  for (auto _ : state) {
    auto r = j_integral(m, {1.0, inf, 4.0, JWeight::Tilde});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_JIntegralTilde)->DenseRange(0, 2);

static void BM_JointSurvivor(benchmark::State& state) {
  const PolarModel m = model_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(joint_survivor(m, 3.0, 2.0));
}
BENCHMARK(BM_JointSurvivor)->DenseRange(0, 2);

static void BM_ConditionalCdf(benchmark::State& state) {
  const PolarModel m = model_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_cdf(m, 4.0, 1.0));
}
BENCHMARK(BM_ConditionalCdf)->DenseRange(0, 2);

static void BM_LimitLawNumeric(benchmark::State& state) {
  const LimitLaw law = LimitLaw::gamma(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(law.numeric_cdf(1.3));
}
BENCHMARK(BM_LimitLawNumeric);
