#include "pvbs/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pvbs/errors.hpp"

namespace pvbs {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Orthogonalize w against the deflation space and the first `cols` columns
// of v, two full passes. Returns the accumulated coefficients on v.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& d, const Eigen::MatrixXd& v, Eigen::Index cols,
                              Eigen::Ref<Eigen::VectorXd> w) {
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(cols);
  for (int pass = 0; pass < 2; ++pass) {
    if (d.cols() > 0) w.noalias() -= d * (d.transpose() * w);
    if (cols == 0) continue;
    Eigen::VectorXd h = v.leftCols(cols).transpose() * w;
    w.noalias() -= v.leftCols(cols) * h;
    coeff += h;
  }
  return coeff;
}

}  // namespace

Eigen::VectorXd seeded_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform01(rng) - 0.5;
  return x;
}

KrylovResult lanczos_lowest(const LinearMap& op, std::size_t dim, int nev,
                            const Eigen::MatrixXd& deflation, const KrylovOptions& opts) {
  const auto n = static_cast<Eigen::Index>(dim);
  if (deflation.cols() > 0 && deflation.rows() != n) throw UsageError("deflation basis has wrong length");
  const Eigen::Index free_dim = n - deflation.cols();
  if (nev < 1 || nev > free_dim) throw UsageError("requested eigenvalue count exceeds available dimension");

  // Basis size: at least room for nev vectors plus a few expansion steps.
  const Eigen::Index mb = std::min<Eigen::Index>(free_dim, std::max<Eigen::Index>(opts.max_basis, 2 * nev + 8));
  std::mt19937_64 rng(opts.seed);
  auto random_vector = [&] {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = uniform01(rng) - 0.5;
    return x;
  };

  Eigen::MatrixXd v(n, mb + 1);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(mb, mb);
  Eigen::VectorXd w(n);
  KrylovResult res;

  // Fresh unit vector orthogonal to the deflation space and v[:, 0..cols).
  // Returns false when none can be found (invariant subspace exhausted).
  auto fresh_vector = [&](Eigen::Index cols) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::VectorXd x = random_vector();
      orthogonalize(deflation, v, cols, x);
      const double nrm = x.norm();
      if (nrm > 1e-8) {
        v.col(cols) = x / nrm;
        return true;
      }
    }
    return false;
  };

  if (!fresh_vector(0)) throw UsageError("no start vector outside the deflation space");

  Eigen::Index k = 0;  // number of locked-in (restarted) Ritz vectors
  double anorm = 0.0;
  while (true) {
    double beta = 0.0;
    Eigen::Index filled = mb;
    for (Eigen::Index j = k; j < mb; ++j) {
      op(std::span<const double>(v.col(j).data(), dim), std::span<double>(w.data(), dim));
      ++res.matvecs;
      const Eigen::VectorXd h = orthogonalize(deflation, v, j + 1, w);
      for (Eigen::Index i = 0; i <= j; ++i) {
        t(i, j) = h(i);
        t(j, i) = h(i);
      }
      beta = w.norm();
      anorm = std::max(anorm, std::abs(h(j)) + beta);
      if (j + 1 == mb) {
        if (beta > 1e-14 * std::max(1.0, anorm)) v.col(mb) = w / beta;
        else beta = 0.0;
        break;
      }
      if (beta > 1e-12 * std::max(1.0, anorm)) {
        v.col(j + 1) = w / beta;
        continue;
      }
      // Invariant subspace found: continue with an unrelated direction, zero coupling.
      beta = 0.0;
      if (!fresh_vector(j + 1)) {
        filled = j + 1;
        break;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.topLeftCorner(filled, filled));
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& y = es.eigenvectors();
    anorm = std::max(anorm, theta.cwiseAbs().maxCoeff());
    const double scale = opts.tol * std::max(1.0, anorm);

    Eigen::VectorXd resid(nev);
    bool ok = true;
    for (int i = 0; i < nev; ++i) {
      resid(i) = (filled == mb) ? std::abs(beta * y(filled - 1, i)) : 0.0;
      if (resid(i) > scale) ok = false;
    }
    const bool out_of_budget = res.matvecs >= opts.max_matvecs;
    if (ok || out_of_budget || filled < mb) {
      res.values = theta.head(nev);
      res.vectors = v.leftCols(filled) * y.leftCols(nev);
      res.residuals = resid;
      res.converged = ok || filled < mb;
      return res;
    }

    // Thick restart: keep the lowest p Ritz vectors and the residual direction.
    const Eigen::Index p = std::min<Eigen::Index>(mb - 1, nev + (mb - nev) / 2);
    Eigen::MatrixXd kept = v.leftCols(mb) * y.leftCols(p);
    v.leftCols(p) = kept;
    v.col(p) = v.col(mb);
    t.setZero();
    for (Eigen::Index i = 0; i < p; ++i) t(i, i) = theta(i);
    k = p;
  }
}

}  // namespace pvbs
