#include "cubiclab/cantor.hpp"
#include "cubiclab/planar.hpp"
#include "cubiclab/renorm.hpp"
#include "cubiclab/wangyoung.hpp"

#include <benchmark/benchmark.h>

using namespace cubiclab;

static void BM_BuildKm(benchmark::State& state) {
  const int gen = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cantor::build_Km(6, gen));
}
BENCHMARK(BM_BuildKm)->DenseRange(2, 5);

static void BM_ExactThickness(benchmark::State& state) {
  const auto k = cantor::build_Km(6, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cantor::thickness(k));
  state.SetComplexityN(static_cast<long>(k.size()));
}
BENCHMARK(BM_ExactThickness)->DenseRange(2, 5)->Complexity();

static void BM_ResidualNorm(benchmark::State& state) {
  renorm::ModelParams p;
  p.perturbation.kind = renorm::Perturbation::Kind::quartic;
  p.perturbation.epsilon = 0.1;
  renorm::ResidualOptions o;
  o.grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(renorm::residual_norm(p, 8, o));
}
BENCHMARK(BM_ResidualNorm)->Arg(21)->Arg(41);

static void BM_Lyapunov(benchmark::State& state) {
  const auto map = planar::cubic_henon_family()({2.8, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(planar::lyapunov(map, {0.1, 0.9}, state.range(0), 1000));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Lyapunov)->Arg(100000);

static void BM_MuStar(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(wangyoung::find_mu_star());
}
BENCHMARK(BM_MuStar);
BENCHMARK_MAIN();
