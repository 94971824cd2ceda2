#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pvbs/hamiltonian.hpp"
#include "pvbs/krylov.hpp"

namespace pvbs {

/// `bounded`: no eigensolve, the sector's Gershgorin bound already exceeds the gap.
enum class SolveMethod { dense, diagonal, krylov, bounded };
std::string to_string(SolveMethod m);

struct SolverOptions {
  // Sectors up to this size use a full dense eigensolve.
  std::size_t dense_solve_max = 512;
  KrylovOptions krylov;
  // Re-run deflated Krylov once more to confirm nothing lower was missed.
  bool verify = false;
};

struct EigenSolve {
  std::vector<double> values;  // ascending
  Eigen::MatrixXd vectors;     // size x values.size(), sector basis
  std::vector<double> residuals;
  SolveMethod method = SolveMethod::dense;
  std::size_t matvecs = 0;
  bool converged = true;
};

/// Lowest k eigenpairs, multiplicities included: the iterative path finds
/// them one at a time, each run deflating the vectors already found.
EigenSolve lowest_eigenpairs(const SectorOperator& op, int k, const SolverOptions& opts = {});

/// k smallest eigenvalues. Throws ConvergenceError if the iterative path
/// does not converge.
std::vector<double> lowest_eigenvalues(const SectorOperator& op, int k, std::uint64_t seed = 42,
                                       const SolverOptions& opts = {});

/// max |eigenvalue|. Throws ConvergenceError on failure.
double spectral_radius(const SectorOperator& op, const SolverOptions& opts = {});

struct SectorSpectrum {
  std::vector<int> occupation;
  std::size_t size = 0;
  std::vector<double> lowest;  // ascending
  SolveMethod method = SolveMethod::dense;
  bool converged = true;
  double residual = 0.0;  // worst residual among iterative values
  double lower_bound = 0.0;  // Gershgorin bound, Krylov sectors only
  std::size_t kernel_dim = 0;
  Eigen::MatrixXd kernel_vectors;  // size x kernel_dim, only when requested
};

struct SpectralReport {
  std::size_t num_sites = 0;
  std::size_t num_edges = 0;
  std::size_t kernel_dim = 0;
  double gap = std::numeric_limits<double>::infinity();  // smallest eigenvalue above zero_tol
  double zero_tol = 0.0;
  bool converged = true;     // every sector converged
  bool gap_resolved = false; // converged and gap > 100 zero_tol
  std::vector<SectorSpectrum> sectors;      // lexicographic occupation order
  std::vector<std::vector<int>> unresolved; // sectors that did not converge
};

struct ReportOptions {
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::optional<double> zero_tol;  // default 1e-9 (1 + |E|)
  OperatorLimits limits;
  SolverOptions solver;
  bool keep_kernel_vectors = false;
  // Skip the eigensolve of sectors whose Gershgorin bound is at least the gap.
  bool screen = true;
};

double default_zero_tol(std::size_t num_edges);

/// Spectrum of H on the region, sector by sector. Each sector reports its
/// eigenvalues up to the first one above zero_tol (at least 2^n + 2 values
/// when they come for free from a dense or diagonal solve). With screening,
/// iterative sectors whose Gershgorin bound is >= the final gap are reported
/// as `bounded` with no eigenvalues; they hold no kernel and cannot carry the
/// gap. The set of bounded sectors does not depend on the worker count.
SpectralReport spectral_report(const Region& region, const AnisotropyModel& model,
                               const ReportOptions& options = {});

/// Seed used for one sector; independent of scheduling.
std::uint64_t sector_seed(std::uint64_t seed, const std::vector<int>& occupation);

}  // namespace pvbs
