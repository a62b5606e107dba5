#include <benchmark/benchmark.h>

#include "bellman/bellman_function.hpp"
#include "bellman/heat.hpp"
#include "bellman/mollifier.hpp"
#include "bellman/psd.hpp"

using namespace bellman;

namespace {

const Exponents kE(2, 6, 3);

void BM_EvalA(benchmark::State& state) {
  const BellmanModel model(coefficients_default(kE), kE);
  Rng rng(1);
  std::vector<TriplePoint> pts;
  for (int i = 0; i < 1024; ++i) pts.emplace_back(log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(model.eval_A(pts[i++ & 1023]));
}
BENCHMARK(BM_EvalA);

void BM_BuildM(benchmark::State& state) {
  const BellmanModel model(coefficients_default(kE), kE);
  const Region region = kOpenRegions[static_cast<std::size_t>(state.range(0))];
  Rng rng(2);
  std::vector<GammaPoint> pts;
  for (int i = 0; i < 1024; ++i) pts.push_back(sample_gamma_region(rng, region, 1e-3, 1e3));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_M(model, pts[i++ & 1023], Sign::Plus));
}
BENCHMARK(BM_BuildM)->DenseRange(0, 5);

void BM_PsdCheck(benchmark::State& state) {
  const BellmanModel model(coefficients_default(kE), kE);
  Rng rng(3);
  const Matrix3 m = build_M(model, sample_gamma_region(rng, Region::R4, 1e-3, 1e3), Sign::Minus);
  for (auto _ : state) benchmark::DoNotOptimize(psd_check(m));
}
BENCHMARK(BM_PsdCheck);

void BM_Mollify(benchmark::State& state) {
  const BellmanModel model(coefficients_default(kE), kE);
  const Mollifier moll(0.05, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(moll.value(model, {1.0, 1.0, 1.0}));
}
BENCHMARK(BM_Mollify)->Arg(8)->Arg(16)->Arg(24);

void BM_HeatValue(benchmark::State& state) {
  const PiecewiseFunction f = bump_battery().front().g.function();
  const double t = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(heat_value(f, 0.3, t));
}
BENCHMARK(BM_HeatValue)->Arg(5)->Arg(100);

}  // namespace
BENCHMARK_MAIN();
