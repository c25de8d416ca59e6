#include <benchmark/benchmark.h>

#include "mctail/grid.hpp"
#include "mctail/hill.hpp"
#include "mctail/stable.hpp"

namespace {

void BM_HillEstimate(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const mctail::Sample s =
      mctail::sample({1.5, 0.0, mctail::kDefaultGamma, 0.0}, n, {2, 0, 0});
  const mctail::Sample tail =
      mctail::tail_transform(s, mctail::TailMode::Upper).sample;
  tail.ascending();  // sort once outside the loop
  const std::size_t k = n / 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mctail::hill_estimate(tail, k));
  }
}

void BM_HillCurve(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const mctail::Sample s =
      mctail::sample({1.5, 0.0, mctail::kDefaultGamma, 0.0}, n, {3, 0, 0});
  const mctail::Sample tail =
      mctail::tail_transform(s, mctail::TailMode::Upper).sample;
  const mctail::KGrid grid = mctail::KGrid::from_fractions(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mctail::hill_curve(tail, grid));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(grid.size()));
}

}  // namespace

BENCHMARK(BM_HillEstimate)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_HillCurve)->Arg(1000)->Arg(10000);
