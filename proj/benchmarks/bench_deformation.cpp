#include <benchmark/benchmark.h>

#include "gha/deformation.hpp"
#include "gha/models.hpp"

namespace {

gha::DghaRealization diagonal_deformation(gha::Index N) {
  const auto g = gha::model_realization(gha::ModelSpec::poschl_teller(2.0), N, 8);
  const auto pair = gha::number_similarity(gha::Profile::rational_pt(), N, 8, g.c.basis_tag());
  return gha::deform(g, pair.S, pair.S_inv);
}

void BM_BuildFamilies(benchmark::State& state) {
  const auto d = diagonal_deformation(64);
  for (auto _ : state) benchmark::DoNotOptimize(gha::build_families(d, 55));
}
BENCHMARK(BM_BuildFamilies);

void BM_DghaResiduals(benchmark::State& state) {
  const auto d = diagonal_deformation(64);
  const auto fam = gha::build_families(d, 55);
  for (auto _ : state) benchmark::DoNotOptimize(gha::dgha_residuals(d, fam));
}
BENCHMARK(BM_DghaResiduals);

void BM_QuasiBasis(benchmark::State& state) {
  const auto d = diagonal_deformation(64);
  const auto fam = gha::build_families(d, 55);
  for (auto _ : state) benchmark::DoNotOptimize(gha::quasi_basis_check(fam, 100, 1));
}
BENCHMARK(BM_QuasiBasis);

}  // namespace
