#include <benchmark/benchmark.h>

#include <vector>

#include "pvbs/criterion.hpp"
#include "pvbs/hamiltonian.hpp"
#include "pvbs/krylov.hpp"
#include "pvbs/spectra.hpp"

using namespace pvbs;

namespace {

// Largest n = 1 sector of C_3 (17 sites, 8 particles: 24310 states).
SectorOperator big_sector(Representation rep) {
  return make_hamiltonian(build_box_on_stick(3, 1, 2), AnisotropyModel::midpoint(2, 1, 1e-3), Sector{{8}}, rep);
}

void BM_ApplyMatrixFree(benchmark::State& state) {
  const SectorOperator op = big_sector(Representation::matrix_free);
  std::vector<double> x(op.size(), 1.0), y(op.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(op.size()));
}
BENCHMARK(BM_ApplyMatrixFree);

void BM_ApplySparse(benchmark::State& state) {
  const SectorOperator op = big_sector(Representation::sparse);
  std::vector<double> x(op.size(), 1.0), y(op.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(op.size()));
}
BENCHMARK(BM_ApplySparse);

void BM_BuildSector(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(big_sector(Representation::matrix_free).size());
}
BENCHMARK(BM_BuildSector)->Unit(benchmark::kMillisecond);

void BM_LanczosLowest(benchmark::State& state) {
  const SectorOperator op = big_sector(Representation::sparse);
  const LinearMap map = [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); };
  for (auto _ : state) {
    const KrylovResult r = lanczos_lowest(map, op.size(), static_cast<int>(state.range(0)), {}, {});
    benchmark::DoNotOptimize(r.values.data());
  }
}
BENCHMARK(BM_LanczosLowest)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SpectralReport(benchmark::State& state) {
  const Region r = build_box_on_stick(2, static_cast<int>(state.range(0)), 2);
  const AnisotropyModel model = AnisotropyModel::midpoint(2, static_cast<int>(state.range(0)), 1e-2);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_report(r, model).gap);
}
BENCHMARK(BM_SpectralReport)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_AuditCounts(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(audit_counts(static_cast<int>(state.range(0)), 2, 3).pass());
}
BENCHMARK(BM_AuditCounts)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
