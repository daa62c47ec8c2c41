#include <benchmark/benchmark.h>

#include <cmath>

#include "singctrl/beam.hpp"
#include "singctrl/beam_hum.hpp"
#include "singctrl/cascade.hpp"
#include "singctrl/wave.hpp"
#include "singctrl/wave_hum.hpp"

using namespace singctrl;

static void BM_WaveSolve(benchmark::State& state) {
  const SpaceGrid g{static_cast<int>(state.range(0))};
  WaveProblem p;
  p.grid = g;
  p.tgrid = wave_time_grid(g, 2.5);
  p.position = sample_nodes(g, [](double x) { return std::pow(std::sin(2 * M_PI * x), 4); });
  p.velocity.assign(g.nodes(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_wave(p).u.data());
  state.SetItemsProcessed(state.iterations() * int64_t(p.tgrid.size()) * g.nodes());
}
BENCHMARK(BM_WaveSolve)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_BeamSolve(benchmark::State& state) {
  BeamProblem p;
  p.eps = 1e-3;
  p.grid = SpaceGrid{static_cast<int>(state.range(0))};
  p.tgrid = TimeGrid{2.5, 1000};
  p.y0 = hermite_interpolant(
      p.grid, [](double x) { return std::pow(std::sin(2 * M_PI * x), 4); },
      [](double x) { return 8 * M_PI * std::pow(std::sin(2 * M_PI * x), 3) * std::cos(2 * M_PI * x); });
  p.y1.assign(p.y0.size(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_beam(p).y.data());
  state.SetItemsProcessed(state.iterations() * int64_t(p.tgrid.n_steps));
}
BENCHMARK(BM_BeamSolve)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_WaveControl(benchmark::State& state) {
  auto p = default_wave_problem(static_cast<int>(state.range(0)));
  int its = 0;
  for (auto _ : state) {
    auto r = solve_wave_control(p);
    its = r.iterations;
    benchmark::DoNotOptimize(r.control.values.data());
  }
  state.counters["cg_iterations"] = its;
}
BENCHMARK(BM_WaveControl)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Cascade(benchmark::State& state) {
  auto in = default_cascade_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_cascade(in).levels.size());
}
BENCHMARK(BM_Cascade)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
