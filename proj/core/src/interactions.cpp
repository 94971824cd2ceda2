#include "pvbs/interactions.hpp"

#include <cmath>

#include "pvbs/errors.hpp"

namespace pvbs {

AnisotropyModel::AnisotropyModel(int dim, int species, double delta, std::vector<double> lambda)
    : dim_(dim), n_(species), delta_(delta), lambda_(std::move(lambda)) {
  if (dim_ < 1) throw UsageError("model dimension must be >= 1");
  if (n_ < 1) throw UsageError("species count must be >= 1");
  if (!(delta_ >= 0.0 && delta_ < 1.0)) throw ModelError("delta must lie in [0, 1)");
  if (lambda_.size() != static_cast<std::size_t>(n_ * dim_))
    throw UsageError("lambda table must have n * d entries");
  if (!is_reference()) {
    for (double l : lambda_)
      if (!(l > 0.0) || !std::isfinite(l)) throw ModelError("anisotropy parameters must be positive");
  }
}

AnisotropyModel AnisotropyModel::midpoint(int dim, int species, double delta) {
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(dim * species));
  for (int i = 1; i <= species; ++i)
    for (int k = 0; k < dim; ++k) table.push_back(std::pow(delta, i));
  return AnisotropyModel(dim, species, delta, std::move(table));
}

AnisotropyModel AnisotropyModel::reference(int dim, int species) {
  return midpoint(dim, species, 0.0);
}

double AnisotropyModel::lambda(int species, int axis) const {
  if (species < 1 || species > n_ || axis < 0 || axis >= dim_)
    throw UsageError("lambda index out of range");
  return lambda_[static_cast<std::size_t>((species - 1) * dim_ + axis)];
}

ValidationReport validate_anisotropy(const AnisotropyModel& model) {
  ValidationReport report;
  if (model.is_reference()) return report;
  const double delta = model.delta();
  for (int i = 1; i <= model.species(); ++i) {
    for (int k = 0; k < model.dim(); ++k) {
      const double l = model.lambda(i, k);
      if (!(l > 0.0)) throw ModelError("anisotropy parameters must be positive");
      const double lo = 0.5 * std::pow(delta, i), hi = 2.0 * std::pow(delta, i);
      if (l < lo || l > hi) report.violations.push_back({i, k, l, lo, hi});
    }
  }
  for (int k = 0; k < model.dim(); ++k) {
    for (int i = 1; i <= model.species(); ++i) {
      for (int j = i + 1; j <= model.species(); ++j) {
        RatioWindow w;
        w.axis = k;
        w.lower_species = i;
        w.upper_species = j;
        w.ratio = model.lambda(j, k) / model.lambda(i, k);
        w.lower = 0.25 * std::pow(delta, j - i);
        w.upper = 4.0 * std::pow(delta, j - i);
        w.inside = w.ratio >= w.lower && w.ratio <= w.upper;
        report.ratios.push_back(w);
      }
    }
  }
  return report;
}

namespace {

// Adds |v><v| for v = (a |x> + b |y>) / sqrt(a^2 + b^2).
void add_rank_one(TwoSiteOperator& h, int x, double a, int y, double b) {
  const double norm2 = a * a + b * b;
  h(x, x) += a * a / norm2;
  h(y, y) += b * b / norm2;
  h(x, y) += a * b / norm2;
  h(y, x) += a * b / norm2;
}

}  // namespace

TwoSiteOperator build_interaction(const AnisotropyModel& model, int axis) {
  if (axis < 0 || axis >= model.dim()) throw UsageError("interaction axis out of range");
  const int n = model.species();
  if (model.is_reference()) return build_reference_interaction(n);
  const int q = n + 1;
  TwoSiteOperator h = TwoSiteOperator::Zero(q * q, q * q);
  for (int i = 1; i <= n; ++i) {
    // |0 i> - lambda_i |i 0>
    add_rank_one(h, 0 * q + i, 1.0, i * q + 0, -model.lambda(i, axis));
    h(i * q + i, i * q + i) += 1.0;
    for (int j = i + 1; j <= n; ++j) {
      // Scaled by 1/lambda_i: |i j> - (lambda_j / lambda_i) |j i>. Same projector,
      // no underflow for tiny lambda.
      add_rank_one(h, i * q + j, 1.0, j * q + i, -model.lambda(j, axis) / model.lambda(i, axis));
    }
  }
  return h;
}

TwoSiteOperator build_reference_interaction(int species) {
  if (species < 1) throw UsageError("species count must be >= 1");
  const int q = species + 1;
  TwoSiteOperator h = TwoSiteOperator::Zero(q * q, q * q);
  for (int i = 1; i <= species; ++i) {
    h(0 * q + i, 0 * q + i) = 1.0;
    for (int j = i; j <= species; ++j) h(i * q + j, i * q + j) = 1.0;
  }
  return h;
}

double perturbation_norm(const AnisotropyModel& model, int axis) {
  const TwoSiteOperator diff = build_interaction(model, axis) - build_reference_interaction(model.species());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double perturbation_norm_bound(const AnisotropyModel& model) {
  const double n = model.species();
  return 8.0 * model.delta() * (n * n + n);
}

}  // namespace pvbs
