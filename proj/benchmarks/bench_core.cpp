// Microbenchmarks of the hot path: variety evaluation, candidate-plane
// construction, per-sample cost, and one angular row of the search grid.

#include "slcv/simkit.hpp"

#include <benchmark/benchmark.h>

namespace {

slcv::Scene bench_scene() {
  slcv::SceneSpec spec;
  spec.n_cameras = 5;
  spec.n_points = 40;
  spec.seed = 42;
  return slcv::make_scene(spec);
}

const slcv::CostContext& bench_context() {
  static const slcv::CostContext context = [] {
    const slcv::Scene scene = bench_scene();
    return slcv::make_cost_context(scene.recon);
  }();
  return context;
}

void BM_eval_g(benchmark::State& state) {
  const slcv::CostContext& context = bench_context();
  const slcv::Vec4c pi = slcv::unitize(
      slcv::Vec4c(slcv::cd(0.31, 0.11), slcv::cd(-0.62, 0.05), slcv::cd(0.44, -0.09),
                  slcv::cd(0.55, 0.02)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(slcv::eval_g(pi, context.triple));
  }
}
BENCHMARK(BM_eval_g);

void BM_candidate_planes(benchmark::State& state) {
  const slcv::CostContext& context = bench_context();
  const slcv::cd z(0.37, 0.21);
  for (auto _ : state) {
    benchmark::DoNotOptimize(slcv::candidate_planes(context.triple, z));
  }
}
BENCHMARK(BM_candidate_planes);

void BM_cost_z(benchmark::State& state) {
  const slcv::CostContext& context = bench_context();
  const slcv::cd z(0.37, 0.21);
  for (auto _ : state) {
    benchmark::DoNotOptimize(slcv::cost_z(z, context));
  }
}
BENCHMARK(BM_cost_z);

void BM_grid_row(benchmark::State& state) {
  const slcv::CostContext& context = bench_context();
  const int m = static_cast<int>(state.range(0));
  const slcv::GridSpec spec{1, m};
  for (auto _ : state) {
    benchmark::DoNotOptimize(slcv::grid_search(context, spec, 1));
  }
  state.SetItemsProcessed(state.iterations() * (1 + m));
}
BENCHMARK(BM_grid_row)->Arg(16)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
