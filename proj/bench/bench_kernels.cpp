// Deployed (chunked, OpenMP) kernels against their serial references.
// Both sides produce identical or near-identical values; the benchmark pairs
// make the cost of the deterministic chunked layout visible.

#include <benchmark/benchmark.h>

#include <vector>

#include "candual/dual_solver.hpp"
#include "candual/grid.hpp"
#include "candual/oracle.hpp"
#include "candual/parallel.hpp"
#include "candual/radial.hpp"

namespace {

const candual::ScalarParams kSuper{2.0, 1.0, 1.0, 1.0};
const candual::MaterialParams kCaseA{2.0, 1.0, 1.0, 5.0, 1.0, 2.0};
const candual::MaterialParams kCaseB{2.0, 1.0, 1.0, 2.05, 1.0, 1.1};

void bm_brute_min_parallel(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(candual::brute_min_p(kSuper, -20.0, 20.0, n));
  }
}
BENCHMARK(bm_brute_min_parallel)->Arg(1 << 16)->Arg(1 << 20);

void bm_brute_min_serial(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        candual::serial_ref::brute_min_p(kSuper, -20.0, 20.0, n));
  }
}
BENCHMARK(bm_brute_min_serial)->Arg(1 << 16)->Arg(1 << 20);

void bm_saddle_scan_parallel(benchmark::State& state) {
  const auto cp = candual::critical_points(kSuper).front();
  const auto n = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(candual::scan_xi_saddle(kSuper, cp, 5.0, n));
  }
}
BENCHMARK(bm_saddle_scan_parallel)->Arg(201)->Arg(801);

void bm_saddle_scan_serial(benchmark::State& state) {
  const auto cp = candual::critical_points(kSuper).front();
  const auto n = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        candual::serial_ref::scan_xi_saddle(kSuper, cp, 5.0, n));
  }
}
BENCHMARK(bm_saddle_scan_serial)->Arg(201)->Arg(801);

void bm_pointwise_solve_parallel(benchmark::State& state) {
  const auto grid = candual::RadialGrid::simpson(
      kCaseB.a, kCaseB.b, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        candual::solve_pointwise(kCaseB, grid, candual::Branch::Middle));
  }
}
BENCHMARK(bm_pointwise_solve_parallel)->Arg(2049)->Arg(8193);

void bm_pointwise_solve_serial(benchmark::State& state) {
  const auto grid = candual::RadialGrid::simpson(
      kCaseB.a, kCaseB.b, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(candual::serial_ref::solve_pointwise(
        kCaseB, grid, candual::Branch::Middle));
  }
}
BENCHMARK(bm_pointwise_solve_serial)->Arg(2049)->Arg(8193);

void bm_integrate_parallel(benchmark::State& state) {
  const auto grid = candual::RadialGrid::simpson(
      kCaseA.a, kCaseA.b, static_cast<int>(state.range(0)));
  std::vector<double> vals(grid.nodes().size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double r = grid.nodes()[i];
    vals[i] = r * r - 3.0 * r + 1.0 / r;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid.integrate(vals));
  }
}
BENCHMARK(bm_integrate_parallel)->Arg(8193)->Arg(65537);

void bm_integrate_serial(benchmark::State& state) {
  const auto grid = candual::RadialGrid::simpson(
      kCaseA.a, kCaseA.b, static_cast<int>(state.range(0)));
  std::vector<double> vals(grid.nodes().size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double r = grid.nodes()[i];
    vals[i] = r * r - 3.0 * r + 1.0 / r;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(candual::serial_ref::integrate_value(grid, vals));
  }
}
BENCHMARK(bm_integrate_serial)->Arg(8193)->Arg(65537);

}  // namespace

BENCHMARK_MAIN();
