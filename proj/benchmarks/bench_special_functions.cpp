#include <benchmark/benchmark.h>

#include "gha/special_functions.hpp"

namespace {

void BM_Gegenbauer(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double u = -0.99;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gha::gegenbauer(n, 2.5, u));
    u = u > 0.98 ? -0.99 : u + 0.01;
  }
}
BENCHMARK(BM_Gegenbauer)->Arg(5)->Arg(20)->Arg(100);

void BM_Orthonormality(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gha::orthonormality_matrix(2.5, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Orthonormality)->Arg(20);

}  // namespace
