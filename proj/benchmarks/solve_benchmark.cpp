#include <benchmark/benchmark.h>

#include "aopnpl/crb.hpp"
#include "aopnpl/estimator.hpp"
#include "aopnpl/synth.hpp"

namespace {

using namespace aopnpl;

Scene MakeScene(int n, int m) {
  SceneConfig cfg;
  cfg.n_points = n;
  cfg.n_lines = m;
  cfg.sigma_px = 5.0;
  std::mt19937_64 rng(7);
  Scene s = GenerateScene(cfg, rng);
  AddNoise(s.points, s.lines, cfg.sigma_px, cfg.intrinsics, rng);
  return s;
}

void BM_SolvePoints(benchmark::State& state) {
  const Scene s = MakeScene(static_cast<int>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(Estimate(s.points, s.lines));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolvePoints)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_SolveLines(benchmark::State& state) {
  const Scene s = MakeScene(0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Estimate(s.points, s.lines));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveLines)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_SolveCombined(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scene s = MakeScene(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(Estimate(s.points, s.lines));
  state.SetComplexityN(2 * state.range(0));
}
BENCHMARK(BM_SolveCombined)->RangeMultiplier(4)->Range(64, 8192)->Complexity(benchmark::oN);

void BM_FirstStepOnly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scene s = MakeScene(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(ConsistentEstimate(s.points, s.lines));
}
BENCHMARK(BM_FirstStepOnly)->Arg(1000);

void BM_Crb(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scene s = MakeScene(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeCrb(s.true_pose, s.points, s.lines, 1e-5));
}
BENCHMARK(BM_Crb)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
