#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "pvbs/errors.hpp"
#include "pvbs/spectra.hpp"

using namespace pvbs;

namespace {

double max_integer_distance(const SpectralReport& rep) {
  double worst = 0;
  for (const auto& s : rep.sectors)
    for (double v : s.lowest) worst = std::max(worst, std::abs(v - std::round(v)));
  return worst;
}

}  // namespace

TEST(Spectra, ReferenceGapIsOne) {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      const SpectralReport rep = spectral_report(build_box_on_stick(m, n, 2), AnisotropyModel::reference(2, n));
      EXPECT_NEAR(rep.gap, 1.0, 1e-10);
      EXPECT_EQ(rep.kernel_dim, std::size_t{1} << n);
      EXPECT_LT(max_integer_distance(rep), 1e-9);
      EXPECT_TRUE(rep.gap_resolved);
    }
}

TEST(Spectra, MatchesFullDenseOracle) {
  const int n = 1;
  const Region r = build_box_on_stick(2, n, 2);
  for (double delta : {0.2, 0.05}) {
    const AnisotropyModel model = AnisotropyModel::midpoint(2, n, delta);
    const Eigen::VectorXd ev = oracle::eigenvalues(oracle::full_hamiltonian(r, n, {oracle::midpoint_lambda(n, delta),
                                                                                   oracle::midpoint_lambda(n, delta)}));
    ReportOptions o;
    o.screen = false;
    const SpectralReport rep = spectral_report(r, model, o);
    EXPECT_NEAR(rep.gap, oracle::gap(ev), 1e-10);
    EXPECT_EQ(rep.kernel_dim, oracle::kernel_dim(ev));
    EXPECT_NEAR(ev(0), 0.0, 1e-12);  // frustration free
  }
}

TEST(Spectra, TwoSpeciesAgainstOracle) {
  const int n = 2;
  const Region r = build_box_on_stick(1, n, 2);
  const AnisotropyModel model = AnisotropyModel::midpoint(2, n, 0.1);
  const auto lam = oracle::midpoint_lambda(n, 0.1);
  const Eigen::VectorXd ev = oracle::eigenvalues(oracle::full_hamiltonian(r, n, {lam, lam}));
  const SpectralReport rep = spectral_report(r, model);
  EXPECT_NEAR(rep.gap, oracle::gap(ev), 1e-10);
  EXPECT_EQ(rep.kernel_dim, 4u);
  EXPECT_EQ(oracle::kernel_dim(ev), 4u);
}

TEST(Spectra, IterativePathAgreesWithDensePath) {
  const Region r = build_box_on_stick(2, 1, 2);
  const AnisotropyModel model = AnisotropyModel::midpoint(2, 1, 0.05);
  ReportOptions dense, iterative;
  iterative.solver.dense_solve_max = 0;
  iterative.screen = false;
  const SpectralReport a = spectral_report(r, model, dense);
  const SpectralReport b = spectral_report(r, model, iterative);
  EXPECT_NEAR(a.gap, b.gap, 1e-9);
  EXPECT_EQ(a.kernel_dim, b.kernel_dim);
  bool used_krylov = false;
  for (const auto& s : b.sectors) used_krylov |= s.method == SolveMethod::krylov;
  EXPECT_TRUE(used_krylov);
}

TEST(Spectra, ScreeningDoesNotChangeTheAnswer) {
  const Region r = build_box_on_stick(2, 2, 2);
  const AnisotropyModel model = AnisotropyModel::midpoint(2, 2, 0.05);
  ReportOptions on, off;
  off.screen = false;
  const SpectralReport a = spectral_report(r, model, on);
  const SpectralReport b = spectral_report(r, model, off);
  EXPECT_NEAR(a.gap, b.gap, 1e-10);
  EXPECT_EQ(a.kernel_dim, b.kernel_dim);
  for (std::size_t i = 0; i < a.sectors.size(); ++i) {
    if (a.sectors[i].method != SolveMethod::bounded) continue;
    ASSERT_FALSE(b.sectors[i].lowest.empty());
    EXPECT_GE(b.sectors[i].lowest.front(), a.gap - 1e-10);
    EXPECT_LE(a.sectors[i].lower_bound, b.sectors[i].lowest.front() + 1e-12);
  }
}

TEST(Spectra, WorkerCountDoesNotChangeResults) {
  const Region r = build_box_on_stick(2, 2, 2);
  const AnisotropyModel model = AnisotropyModel::midpoint(2, 2, 0.02);
  ReportOptions one, three;
  three.workers = 3;
  const SpectralReport a = spectral_report(r, model, one);
  const SpectralReport b = spectral_report(r, model, three);
  EXPECT_EQ(a.gap, b.gap);
  ASSERT_EQ(a.sectors.size(), b.sectors.size());
  for (std::size_t i = 0; i < a.sectors.size(); ++i) {
    EXPECT_EQ(a.sectors[i].occupation, b.sectors[i].occupation);
    EXPECT_EQ(a.sectors[i].method, b.sectors[i].method);
    EXPECT_EQ(a.sectors[i].lowest, b.sectors[i].lowest);
  }
}

TEST(Spectra, KernelVectorsLieInKernel) {
  const Region r = build_box_on_stick(1, 2, 2);
  const AnisotropyModel model = AnisotropyModel::midpoint(2, 2, 0.1);
  ReportOptions o;
  o.keep_kernel_vectors = true;
  const SpectralReport rep = spectral_report(r, model, o);
  std::size_t total = 0;
  for (const auto& s : rep.sectors) {
    ASSERT_EQ(static_cast<std::size_t>(s.kernel_vectors.cols()), s.kernel_dim);
    if (s.kernel_dim == 0) continue;
    total += s.kernel_dim;
    const SectorOperator op = make_hamiltonian(r, model, Sector{s.occupation});
    for (Eigen::Index j = 0; j < s.kernel_vectors.cols(); ++j) {
      const Eigen::VectorXd v = s.kernel_vectors.col(j);
      const auto hv = op.apply(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
      EXPECT_LT(Eigen::Map<const Eigen::VectorXd>(hv.data(), v.size()).norm(), 1e-8);
    }
  }
  EXPECT_EQ(total, rep.kernel_dim);
}

TEST(Spectra, LowestEigenpairsWithMultiplicity) {
  const Region r = build_box_on_stick(2, 1, 2);
  const SectorOperator op = make_reference_hamiltonian(r, 1, Sector{{4}});
  SolverOptions iterative;
  iterative.dense_solve_max = 0;
  const EigenSolve a = lowest_eigenpairs(op, 6, iterative);
  const EigenSolve b = lowest_eigenpairs(op.with_representation(Representation::dense), 6);
  ASSERT_EQ(a.values.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
}

TEST(Spectra, SpectralRadius) {
  const Region r = build_box_on_stick(1, 1, 2);
  const SectorOperator op = make_hamiltonian(r, AnisotropyModel::midpoint(2, 1, 0.1), Sector{{2}});
  const Eigen::VectorXd ev = oracle::eigenvalues(op.with_representation(Representation::dense).assemble_dense());
  EXPECT_NEAR(spectral_radius(op), ev.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Spectra, TorusReferenceGapIsDimension) {
  // With one species the reference energy counts edges with an occupied head.
  // Every torus site has in-degree d, so the energy is d times the particle
  // number and the gap is d, not 1.
  const Region t1 = build_torus(1, 2);
  const SpectralReport rep = spectral_report(t1, AnisotropyModel::reference(2, 1));
  const Eigen::VectorXd ev = oracle::eigenvalues(oracle::full_hamiltonian(t1, 1, {{}, {}}));
  EXPECT_NEAR(rep.gap, oracle::gap(ev), 1e-12);
  EXPECT_NEAR(rep.gap, 2.0, 1e-12);
  EXPECT_EQ(rep.kernel_dim, 1u);
  EXPECT_NEAR(spectral_report(build_torus(2, 2), AnisotropyModel::reference(2, 1)).gap, 2.0, 1e-12);
}

TEST(Spectra, ReferenceSpectrumIsIntegral) {
  for (const Region& r : {build_torus(1, 2), build_box(2, 2), build_stick(5, 2)}) {
    const SpectralReport rep = spectral_report(r, AnisotropyModel::reference(2, 2));
    EXPECT_LT(max_integer_distance(rep), 1e-12);
    EXPECT_GE(rep.gap, 1.0 - 1e-12);
  }
}

TEST(Spectra, CapacityLimit) {
  ReportOptions o;
  o.limits.max_dimension = 50;
  EXPECT_THROW(spectral_report(build_box_on_stick(2, 1, 2), AnisotropyModel::midpoint(2, 1, 0.1), o),
               CapacityError);
}

TEST(Spectra, ZeroToleranceScalesWithEdges) {
  EXPECT_DOUBLE_EQ(default_zero_tol(13), 1.4e-8);
  const SpectralReport rep = spectral_report(build_box_on_stick(1, 1, 2), AnisotropyModel::reference(2, 1));
  EXPECT_DOUBLE_EQ(rep.zero_tol, default_zero_tol(rep.num_edges));
}

TEST(Spectra, SectorSeedDependsOnlyOnInputs) {
  EXPECT_EQ(sector_seed(42, {1, 2}), sector_seed(42, {1, 2}));
  EXPECT_NE(sector_seed(42, {1, 2}), sector_seed(42, {2, 1}));
  EXPECT_NE(sector_seed(42, {1, 2}), sector_seed(43, {1, 2}));
}
