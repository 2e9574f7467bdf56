#include <benchmark/benchmark.h>

#include "zofd/directions.hpp"
#include "zofd/rng.hpp"

namespace {

// range(0): kind index, range(1): d. ell is d / 2 throughout.
void BM_Generate(benchmark::State& state) {
  const auto kind = zofd::kAllDirectionKinds[static_cast<std::size_t>(state.range(0))];
  const int d = static_cast<int>(state.range(1));
  const int ell = d / 2;
  zofd::RngStream rng(7, 0);
  for (auto _ : state) {
    auto p = zofd::generate(kind, d, ell, rng);
    benchmark::DoNotOptimize(p);
  }
  state.SetLabel(std::string(zofd::to_string(kind)));
  state.SetComplexityN(d);
}

void generator_args(benchmark::internal::Benchmark* b) {
  for (std::size_t k = 0; k < zofd::kAllDirectionKinds.size(); ++k) {
    for (int d : {16, 64, 256, 1024}) {
      b->Args({static_cast<long>(k), d});
    }
  }
}

}  // namespace

BENCHMARK(BM_Generate)->Apply(generator_args)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
