#include <benchmark/benchmark.h>

#include "mctail/grid.hpp"
#include "mctail/stable.hpp"

namespace {

void BM_StableSample(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 100.0;
  const mctail::StableParams params{alpha, 0.0, mctail::kDefaultGamma, 0.0};
  const std::size_t n = 10000;
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mctail::sample(params, n, {1, 0, rep++}));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n);
}

void BM_CharacteristicFunction(benchmark::State& state) {
  const mctail::StableParams params{1.5, 0.3, 1.0, 0.5};
  double u = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mctail::characteristic_function(params, u));
    u += 0.1;
  }
}

}  // namespace

BENCHMARK(BM_StableSample)->Arg(120)->Arg(150)->Arg(200);
BENCHMARK(BM_CharacteristicFunction);
