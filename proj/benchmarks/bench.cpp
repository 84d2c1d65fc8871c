#include <benchmark/benchmark.h>

#include "shellprobe/geometry.hpp"
#include "shellprobe/shell_solver.hpp"
#include "shellprobe/simulator.hpp"

using namespace shellprobe;

namespace {

ShellParams ball() { return ShellParams::with_tau(40.0, 0.13, 8.6e-4, 0.4, 1300.0); }

void BM_SolveIndentation(benchmark::State& state) {
  SolverOptions o;
  o.grid_size = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_indentation(ball(), -4.0, o).force);
}
BENCHMARK(BM_SolveIndentation)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SolveIndentationFull(benchmark::State& state) {
  SolverOptions o;
  o.membrane_limit = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_indentation(ball(), -3.0, o).force);
}
BENCHMARK(BM_SolveIndentationFull)->Unit(benchmark::kMillisecond);

void BM_CriticalDepth(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(critical_depth(ball()).W0);
}
BENCHMARK(BM_CriticalDepth)->Unit(benchmark::kMillisecond);

void BM_SimulatorStep(benchmark::State& state) {
  auto s = init_sim(make_icosphere(static_cast<int>(state.range(0)), 0.13, Vec3(0, 0, 1)),
                    {2.34e6, 0.4, 8.6e-4, 1100.0, 1300.0});
  ScenarioConfig c;
  c.planes.push_back({});
  for (auto _ : state) step(s, c);
  state.counters["faces"] = static_cast<double>(s.mesh.num_faces());
}
BENCHMARK(BM_SimulatorStep)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

void BM_SphereFit(benchmark::State& state) {
  const auto mesh = make_icosphere(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_curvature(select_patch(mesh, 0, 0.5)).radius);
}
BENCHMARK(BM_SphereFit)->DenseRange(3, 5)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
