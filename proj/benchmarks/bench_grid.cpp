#include <benchmark/benchmark.h>

#include "mctail/estimator.hpp"
#include "mctail/grid.hpp"
#include "mctail/stable.hpp"

namespace {

mctail::GridSpec bench_spec() {
  mctail::GridSpec spec;
  spec.n = 500;
  spec.alpha0_values = {1.2, 1.4, 1.6, 1.8, 2.0};
  spec.replications = 100;
  spec.master_seed = 4;
  return spec;
}

void BM_SimulateGrid(benchmark::State& state) {
  const mctail::GridSpec spec = bench_spec();
  const unsigned workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mctail::simulate_grid(spec, {}, workers));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(spec.alpha0_values.size() *
                                                    spec.replications));
}

void BM_Estimate(benchmark::State& state) {
  static const mctail::GridSurface grid = mctail::simulate_grid(bench_spec(), {}, 0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const mctail::Sample s = mctail::sample(
        {1.5, 0.0, mctail::kDefaultGamma, 0.0}, grid.spec.n, {5, 1, rep++});
    benchmark::DoNotOptimize(mctail::estimate(s, grid));
  }
}

}  // namespace

BENCHMARK(BM_SimulateGrid)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Estimate)->Unit(benchmark::kMicrosecond);
