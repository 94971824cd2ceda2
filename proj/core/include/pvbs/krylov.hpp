#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>

namespace pvbs {

/// y = A x for a real symmetric A.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovOptions {
  int max_basis = 40;
  std::size_t max_matvecs = 20000;
  double tol = 1e-10;  // relative to max(1, |largest Ritz value|)
  std::uint64_t seed = 42;
};

struct KrylovResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // dim x nev
  Eigen::VectorXd residuals;
  std::size_t matvecs = 0;
  bool converged = false;
};

/// Thick-restart Lanczos for the nev lowest eigenpairs with full
/// reorthogonalization. Columns of `deflation` (orthonormal, may be empty)
/// are projected out of every iterate. The start vector is drawn from the
/// seeded generator, so results are reproducible.
KrylovResult lanczos_lowest(const LinearMap& op, std::size_t dim, int nev,
                            const Eigen::MatrixXd& deflation, const KrylovOptions& opts);

/// Uniform deterministic vector in [-1/2, 1/2)^dim.
Eigen::VectorXd seeded_vector(std::size_t dim, std::uint64_t seed);

}  // namespace pvbs
