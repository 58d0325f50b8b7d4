#include <stlasso/cv.hpp>
#include <stlasso/optimize.hpp>
#include <stlasso/simulate.hpp>

#include <benchmark/benchmark.h>

using namespace stlasso;

namespace {

PanelData lattice_panel(int side, Index T) {
  DgpConfig cfg;
  cfg.side = side;
  cfg.T = T;
  return simulate_panel(make_true_params(cfg), cfg);
}

void BM_Fit(benchmark::State& state) {
  const PanelData panel = lattice_panel(static_cast<int>(state.range(0)), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fit(panel, PenaltyConfig{0.1, 0.1, 0.1}, SolverOptions{}));
}
BENCHMARK(BM_Fit)->Args({2, 50})->Args({2, 200})->Args({3, 200})->Unit(benchmark::kMillisecond);

void BM_GridSearch(benchmark::State& state) {
  const PanelData panel = lattice_panel(2, 100);
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(panel, CvPlan{}, SolverOptions{}));
}
BENCHMARK(BM_GridSearch)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
