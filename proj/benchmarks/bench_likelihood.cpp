#include <stlasso/likelihood.hpp>
#include <stlasso/optimize.hpp>
#include <stlasso/problem.hpp>
#include <stlasso/simulate.hpp>

#include <benchmark/benchmark.h>

using namespace stlasso;

namespace {

struct Problem {
  ModelParams truth;
  PanelData panel;
};

Problem lattice(int side, Index T) {
  DgpConfig cfg;
  cfg.side = side;
  cfg.T = T;
  Problem p{make_true_params(cfg), {}};
  p.panel = simulate_panel(p.truth, cfg);
  return p;
}

void BM_LogLikelihood(benchmark::State& state) {
  const Problem p = lattice(static_cast<int>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(p.truth, p.panel));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_LogLikelihood)->DenseRange(2, 8, 2)->Complexity();

// Problem setup builds the dense Gram matrix of the local designs once per fit.
void BM_ProblemSetup(benchmark::State& state) {
  const Problem p = lattice(static_cast<int>(state.range(0)), 200);
  for (auto _ : state)
    benchmark::DoNotOptimize(PenalizedProblem(p.panel, Sample::full(200, 1), 1, PenaltyConfig{0.1, 0.1, 0.1},
                                              Support::all(p.panel.n(), p.panel.k(), 1)));
}
BENCHMARK(BM_ProblemSetup)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

// The per-iteration cost inside the solver.
void BM_ValueAndGradient(benchmark::State& state) {
  const Problem p = lattice(static_cast<int>(state.range(0)), 200);
  const PenalizedProblem pb(p.panel, Sample::full(200, 1), 1, PenaltyConfig{0.1, 0.1, 0.1},
                            Support::all(p.panel.n(), p.panel.k(), 1));
  const Vector x = pb.to_vector(p.truth);
  Vector g;
  for (auto _ : state) benchmark::DoNotOptimize(pb.value_and_gradient(x, g));
}
BENCHMARK(BM_ValueAndGradient)->DenseRange(2, 8, 2);

void BM_StationarityNorm(benchmark::State& state) {
  const Problem p = lattice(static_cast<int>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(stationarity_check(p.truth));
}
BENCHMARK(BM_StationarityNorm)->DenseRange(2, 8, 2);

}  // namespace
