#include <benchmark/benchmark.h>

#include "bargzero/analysis.hpp"
#include "bargzero/bargmann.hpp"
#include "bargzero/fdsolve.hpp"
#include "bargzero/train.hpp"

using namespace bargzero;

namespace {

void BM_FdSolve(benchmark::State& state) {
  const auto g = make_grid(8.0, static_cast<std::size_t>(state.range(0)));
  const auto p = Potential::double_well(1.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lowest(g, p, 2));
}
BENCHMARK(BM_FdSolve)->Arg(512)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Projection(benchmark::State& state) {
  const auto g = make_grid(8.0, 1024);
  const auto psi = solve_lowest(g, Potential::double_well(1.5), 1)[0].psi;
  const int nmax = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto basis = hermite_basis(g, nmax);
    benchmark::DoNotOptimize(project(psi, basis, g.spacing));
  }
}
BENCHMARK(BM_Projection)->Arg(30)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_FindZeros(benchmark::State& state) {
  const auto g = make_grid(8.0, 1024);
  const auto psi = solve_lowest(g, Potential::double_well(1.5), 1)[0].psi;
  const int nmax = static_cast<int>(state.range(0));
  const auto spectrum = project(psi, hermite_basis(g, nmax), g.spacing);
  const auto poly = to_bargmann(spectrum);  // no floor: full degree
  for (auto _ : state) benchmark::DoNotOptimize(find_zeros(poly));
}
BENCHMARK(BM_FindZeros)->Arg(30)->Arg(60)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_Sweep(benchmark::State& state) {
  const auto a = linspace(0.5, 2.3, 20);
  for (auto _ : state) benchmark::DoNotOptimize(barrier_sweep(a));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

void BM_LossAndGradient(benchmark::State& state) {
  const auto g = make_grid(8.0, 1024);
  const auto sys = Potential::double_well(1.5);
  AnsatzConfig cfg;
  cfg.arch = {static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  const auto p = init_params(0, cfg, sys, +1);
  const LossFunction fn(g, sys, LossSpec{});
  AnsatzParams grad = p;
  for (auto _ : state) benchmark::DoNotOptimize(fn.evaluate(p, grad));
}
BENCHMARK(BM_LossAndGradient)->Args({2, 16})->Args({4, 128})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
