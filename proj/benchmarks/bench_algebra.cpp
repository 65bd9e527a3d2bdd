#include <benchmark/benchmark.h>

#include "gha/algebra.hpp"
#include "gha/models.hpp"

namespace {

void BM_IterateSpectrum(benchmark::State& state) {
  const auto f = gha::CharacteristicFunction::sqrt_shift();
  for (auto _ : state) benchmark::DoNotOptimize(gha::iterate_spectrum(f, 4.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_IterateSpectrum)->Arg(50)->Arg(500);

void BM_ModelRealization(benchmark::State& state) {
  const auto m = gha::ModelSpec::poschl_teller(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(gha::model_realization(m, state.range(0), 8));
}
BENCHMARK(BM_ModelRealization)->Arg(64)->Arg(256);

void BM_GhaResiduals(benchmark::State& state) {
  const auto g = gha::model_realization(gha::ModelSpec::poschl_teller(2.0), state.range(0), 8);
  for (auto _ : state) benchmark::DoNotOptimize(gha::gha_residuals(g));
}
BENCHMARK(BM_GhaResiduals)->Arg(64)->Arg(256);

}  // namespace
