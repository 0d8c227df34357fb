#include <benchmark/benchmark.h>

#include "phdae/adjoint.h"
#include "phdae/bench.h"
#include "phdae/estimator.h"

namespace phdae {
namespace {

const ReducedSystem& Line() {
  static const ReducedSystem red = Reduce(bench::BuildBuiltin("tline-reg"));
  return red;
}

struct Problem {
  TimeGrid grid;
  GridMoments moments;
  PiecewiseConstant x;
  GoalEvaluation goal;
};

Problem Setup(int N) {
  const ReducedSystem& red = Line();
  TimeGrid grid = TimeGrid::Uniform(red.T, N);
  GridMoments mom = ComputeMoments(red.input, grid);
  PiecewiseConstant x = SolvePrimal(red, grid, red.x10, mom);
  GoalEvaluation goal = LocalResiduals(red, x, 0.0, mom);
  return {std::move(grid), std::move(mom), std::move(x), std::move(goal)};
}

void BM_PrimalSolve(benchmark::State& state) {
  const ReducedSystem& red = Line();
  const TimeGrid grid = TimeGrid::Uniform(red.T, int(state.range(0)));
  const GridMoments mom = ComputeMoments(red.input, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolvePrimal(red, grid, red.x10, mom));
  }
}
BENCHMARK(BM_PrimalSolve)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_AdjointDirect(benchmark::State& state) {
  const Problem p = Setup(int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveAdjointDirect(Line(), p.grid, p.goal.sources));
  }
}
BENCHMARK(BM_AdjointDirect)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

// One sweep per iteration, so the cost compares against the direct solve per
// interval count.
void BM_JacobiSweep(benchmark::State& state) {
  const Problem p = Setup(int(state.range(0)));
  JacobiIteration jac(Line(), p.grid, p.goal.sources);
  for (auto _ : state) jac.Sweep();
}
BENCHMARK(BM_JacobiSweep)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Indicators(benchmark::State& state) {
  const Problem p = Setup(int(state.range(0)));
  const AdjointSolve z = SolveAdjointDirect(Line(), p.grid, p.goal.sources);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ComputeIndicators(Line(), p.x, z.z, IndicatorVariant::kFull, p.moments));
  }
}
BENCHMARK(BM_Indicators)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Contraction(benchmark::State& state) {
  const TimeGrid grid = TimeGrid::Uniform(Line().T, int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeContractionReport(Line(), grid));
  }
}
BENCHMARK(BM_Contraction)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace phdae

BENCHMARK_MAIN();
