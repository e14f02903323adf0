#include <benchmark/benchmark.h>

#include <memory>

#include "heatcloak/reproduction.hpp"
#include "heatcloak/scattering.hpp"

using namespace heatcloak;

namespace {

struct Problem {
  double k = 0.3;
  TimeGrid tg;
  std::shared_ptr<const BoundaryMesh> mesh;
  TracePair traces;

  Problem(int n, int m)
      : tg(TimeGrid::over(0.2, m)),
        mesh(std::make_shared<const BoundaryMesh>(discretize(make_curve(Circle{{0.5, 0.5}, 0.25}), n))),
        traces(point_source_traces({{0.25, 0.25}}, *mesh, tg, k)) {}
};

void BM_Assemble(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(LayerKind::single, *p.mesh, p.tg, p.k));
}
BENCHMARK(BM_Assemble)->Args({64, 100})->Args({128, 200})->Unit(benchmark::kMillisecond);

void BM_Apply(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const BlockConvOperator op = assemble_operator(LayerKind::single, *p.mesh, p.tg, p.k);
  for (auto _ : state) benchmark::DoNotOptimize(apply_operator(op, p.traces.dirichlet));
}
BENCHMARK(BM_Apply)->Args({64, 100})->Args({128, 200})->Unit(benchmark::kMillisecond);

void BM_ForwardSolve(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const BlockConvOperator op = assemble_operator(LayerKind::single, *p.mesh, p.tg, p.k);
  for (auto _ : state) benchmark::DoNotOptimize(forward_block_solve(op, p.traces.dirichlet));
}
BENCHMARK(BM_ForwardSolve)->Args({64, 100})->Args({128, 200})->Unit(benchmark::kMillisecond);

void BM_EvaluateGrid(benchmark::State& state) {
  const Problem p(128, 200);
  const LayerPotential u = interior_potential(p.traces, p.mesh, p.tg, p.k);
  const auto targets = uniform_grid({0, 0, 1, 1}, static_cast<int>(state.range(0)), static_cast<int>(state.range(0))).centers();
  for (auto _ : state) benchmark::DoNotOptimize(u.evaluate(targets, 0.2));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(targets.size()));
}
BENCHMARK(BM_EvaluateGrid)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
