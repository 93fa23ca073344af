#include <benchmark/benchmark.h>

#include <cmath>

#include "polar_tails/quadrature.hpp"
#include "polar_tails/special_functions.hpp"

namespace q = polar::quad;

static void BM_GaussKronrodPeaked(benchmark::State& state) {
  const double w = 1e-3;
  for (auto _ : state) {
    auto r = q::gauss_kronrod([w](double x) { return 1.0 / (x * x + w * w); }, -1.0, 1.0, {0.0, 1e-12});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_GaussKronrodPeaked);

static void BM_TanhSinhEndpointSingular(benchmark::State& state) {
  for (auto _ : state) {
    auto r = q::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {0.0, 1e-12});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_TanhSinhEndpointSingular);

static void BM_ExpSinhGaussianTail(benchmark::State& state) {
  for (auto _ : state) {
    auto r = q::exp_sinh([](double x) { return std::exp(-0.5 * x * x); }, 3.0, {0.0, 1e-12});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_ExpSinhGaussianTail);

static void BM_IncompleteGamma(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(polar::gamma_p(1.7, x));
    x = x > 50.0 ? 0.1 : x * 1.01;
  }
}
BENCHMARK(BM_IncompleteGamma);
