#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace pvbs {

/// Two-site operator on C^{n+1} (x) C^{n+1}. Row/column index is
/// (tail state) * (n + 1) + (head state).
using TwoSiteOperator = Eigen::MatrixXd;

/// Anisotropy parameters of the PVBS model. Species are labelled 1..n (they
/// coincide with the nonzero local states), directions by axis 0..d-1.
/// delta == 0 selects the commuting reference model regardless of lambda.
class AnisotropyModel {
 public:
  AnisotropyModel(int dim, int species, double delta, std::vector<double> lambda);

  /// lambda_i^(k) = delta^i in every direction.
  static AnisotropyModel midpoint(int dim, int species, double delta);
  static AnisotropyModel reference(int dim, int species);

  int dim() const noexcept { return dim_; }
  int species() const noexcept { return n_; }
  int local_dim() const noexcept { return n_ + 1; }
  double delta() const noexcept { return delta_; }
  bool is_reference() const noexcept { return delta_ == 0.0; }

  double lambda(int species, int axis) const;
  /// Row-major n x d table; entry (i-1)*d + k.
  const std::vector<double>& lambda_table() const noexcept { return lambda_; }

 private:
  int dim_;
  int n_;
  double delta_;
  std::vector<double> lambda_;
};

struct WindowViolation {
  int species = 0;
  int axis = 0;
  double value = 0;
  double lower = 0;
  double upper = 0;
};

struct RatioWindow {
  int axis = 0;
  int lower_species = 0;  // i
  int upper_species = 0;  // j > i
  double ratio = 0;       // lambda_j / lambda_i
  double lower = 0;       // delta^{j-i} / 4
  double upper = 0;       // 4 delta^{j-i}
  bool inside = false;
};

struct ValidationReport {
  std::vector<WindowViolation> violations;
  std::vector<RatioWindow> ratios;  // informational
  bool valid() const noexcept { return violations.empty(); }
};

/// Checks delta^i / 2 <= lambda_i^(k) <= 2 delta^i for every species and axis,
/// and reports the implied ratio windows. Throws ModelError on nonpositive lambda.
ValidationReport validate_anisotropy(const AnisotropyModel& model);

/// Interaction projector for edges along `axis`.
TwoSiteOperator build_interaction(const AnisotropyModel& model, int axis);

/// delta = 0 projector: sum_i |0 i><0 i| + sum_{i<=j} |i j><i j|.
TwoSiteOperator build_reference_interaction(int species);

/// Operator norm of h^(k) - h_ref, by symmetric eigensolve.
double perturbation_norm(const AnisotropyModel& model, int axis);

/// Per-edge bound 8 delta (n^2 + n) valid under the anisotropy window.
double perturbation_norm_bound(const AnisotropyModel& model);

}  // namespace pvbs
