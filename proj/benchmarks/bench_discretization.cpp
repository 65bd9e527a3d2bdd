#include <benchmark/benchmark.h>

#include "gha/discretization.hpp"

namespace {

void BM_SymmetricEigensolve(benchmark::State& state) {
  const auto m = gha::ModelSpec::poschl_teller(2.0);
  const auto H = gha::build_hamiltonian(m, gha::default_grid(m, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(gha::eigensolve(H, 6));
}
BENCHMARK(BM_SymmetricEigensolve)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GeneralEigensolve(benchmark::State& state) {
  const auto m = gha::ModelSpec::poschl_teller(2.0).with(gha::SimilarityRecipe::multiplication(gha::Profile::rational_pt()));
  const auto g = gha::default_grid(m, static_cast<int>(state.range(0)));
  const auto A = gha::conjugate_by_multiplication(gha::build_hamiltonian(m, g), m.deformation->profile.sample(g.nodes()));
  for (auto _ : state) benchmark::DoNotOptimize(gha::eigensolve(A, 6));
}
BENCHMARK(BM_GeneralEigensolve)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
