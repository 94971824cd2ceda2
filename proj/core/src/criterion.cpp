#include "pvbs/criterion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pvbs/errors.hpp"
#include "pvbs/hamiltonian.hpp"

namespace pvbs {

namespace {

void check_mdn(int m, int d, int n) {
  if (m < 1 || d < 2 || n < 1) throw UsageError("need m >= 1, d >= 2, n >= 1");
}

long long ipow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double threshold(int m, int d, int n) {
  check_mdn(m, d, n);
  const double md = m;
  return 1.0 / md + (8.0 * d / (md * md)) * (1.0 + n / std::pow(md, d - 2));
}

double prefactor(int m, int d, int n) {
  check_mdn(m, d, n);
  return std::pow(static_cast<double>(m), d) / (std::pow(m + 1.0, d) + n);
}

double gap_lower_bound(double gamma, int m, int d, int n) {
  return prefactor(m, d, n) * (gamma - threshold(m, d, n));
}

std::string to_string(CdnVariant v) { return v == CdnVariant::printed ? "printed" : "proof_text"; }

double cdn_box_size(int d, int n, CdnVariant v) {
  check_mdn(1, d, n);
  if (d == 2) return 16.0 * n;
  const double floor = v == CdnVariant::printed ? 3.0 * d : 8.0 * d;
  return std::max(std::pow(static_cast<double>(n), 1.0 / (d - 2)), floor);
}

double c_dn(int d, int n, CdnVariant v) {
  const double m = cdn_box_size(d, n, v);
  const double nn = n;
  return (1.0 - 3.0 / m) / (96.0 * nn * nn * std::pow(m + 1.0, d));
}

double C_mn(int m, int n, int d) {
  check_mdn(m, d, n);
  return 8.0 * (std::pow(m + 1.0, d) + n) * (static_cast<double>(n) * n + n);
}

double C_mn_corrected(int m, int n, int d) {
  check_mdn(m, d, n);
  const double edges = static_cast<double>(d) * m * std::pow(m + 1.0, d - 1) + n;
  return 16.0 * (static_cast<double>(n) * n + n) * edges;
}

std::optional<double> delta_condition(int m, int d, int n) {
  const double t = threshold(m, d, n);
  if (t >= 1.0) return std::nullopt;
  return (1.0 - t) / (3.0 * C_mn(m, n, d));
}

PropVerifyResult prop_verify_check(const AnisotropyModel& model, int m, const ReportOptions& options, double margin) {
  const int n = model.species(), d = model.dim();
  PropVerifyResult out;
  out.margin = margin;
  out.product = 3.0 * C_mn(m, n, d) * model.delta();
  if (!(model.delta() > 0.0) || !(out.product < 1.0))
    throw UsageError("bound needs 0 < 3 C delta < 1, got 3 C delta = " + std::to_string(out.product));
  out.bound = 1.0 - out.product;
  out.report = spectral_report(build_box_on_stick(m, n, d), model, options);
  out.gamma = out.report.gap;
  out.resolved = out.report.gap_resolved;
  out.pass = out.resolved && out.gamma > out.bound + margin;
  return out;
}

PerturbationNormResult perturbation_norm_check(const AnisotropyModel& model, int m, const SolverOptions& solver,
                                               OperatorLimits limits, double slack) {
  const int n = model.species(), d = model.dim();
  const Region region = build_box_on_stick(m, n, d);
  PerturbationNormResult out;
  for (const auto& sector : all_sectors(region.num_sites(), n)) {
    const std::size_t size = static_cast<std::size_t>(sector_dimension(region.num_sites(), sector));
    const Representation rep = size > solver.dense_solve_max ? Representation::sparse : Representation::matrix_free;
    const SectorOperator v = make_perturbation(region, model, sector, rep, limits);
    out.norm = std::max(out.norm, spectral_radius(v, solver));
  }
  out.bound_corrected = C_mn_corrected(m, n, d) * model.delta();
  out.bound_printed = C_mn(m, n, d) * model.delta();
  out.within_corrected = out.norm <= out.bound_corrected + slack;
  out.within_printed = out.norm <= out.bound_printed + slack;
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::unresolved: return "unresolved";
  }
  return "unknown";
}

namespace {

CertificateReport certificate_arithmetic(const AnisotropyModel& model, int m, double gamma, double margin,
                                         bool resolved) {
  CertificateReport c;
  c.m = m;
  c.d = model.dim();
  c.n = model.species();
  c.delta = model.delta();
  c.gamma_Cm = gamma;
  c.threshold = threshold(m, c.d, c.n);
  c.prefactor = prefactor(m, c.d, c.n);
  c.uniform_bound = c.prefactor * (gamma - c.threshold);
  c.margin = margin;
  if (m < 4) c.verdict = Verdict::inconclusive;
  else if (!resolved) c.verdict = Verdict::unresolved;
  else if (gamma > c.threshold + margin) c.verdict = Verdict::certified;
  else c.verdict = Verdict::inconclusive;
  return c;
}

}  // namespace

CertificateReport certify(const AnisotropyModel& model, int m, const ReportOptions& options, double margin) {
  check_mdn(m, model.dim(), model.species());
  SpectralReport rep = spectral_report(build_box_on_stick(m, model.species(), model.dim()), model, options);
  CertificateReport c = certificate_arithmetic(model, m, rep.gap, margin, rep.gap_resolved);
  c.provenance = "measured";
  c.spectral = std::move(rep);
  return c;
}

CertificateReport certify_external(const AnisotropyModel& model, int m, double gamma, double margin) {
  check_mdn(m, model.dim(), model.species());
  CertificateReport c = certificate_arithmetic(model, m, gamma, margin, std::isfinite(gamma));
  c.provenance = "external";
  return c;
}

bool AuditTable::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const AuditRow& r) { return r.pass; });
}

std::vector<std::string> AuditTable::failures() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (!r.pass) out.push_back(r.check);
  return out;
}

AuditTable audit_counts(int m, int n, int d, const std::string& inject_fault) {
  check_mdn(m, d, n);
  const int L = 2 * m + 1;
  const long long base = static_cast<long long>(m) * ipow(m + 1, d - 1);
  const long long colinear = (static_cast<long long>(m) * m - 1) * ipow(m + 1, d - 2);
  const long long corner = static_cast<long long>(m) * m * ipow(m + 1, d - 2);

  AuditTable table;
  auto add = [&](const std::string& check, const std::string& relation, long long expected, long long measured) {
    if (check == inject_fault) measured += 1;
    bool ok = false;
    if (relation == "==") ok = measured == expected;
    else if (relation == "<=") ok = measured <= expected;
    else ok = measured >= expected;
    table.rows.push_back({check, relation, expected, measured, ok});
  };

  const LatticePoint origin{std::vector<int>(static_cast<std::size_t>(d), 0)};
  for (int k = 0; k < d; ++k) {
    const auto count = static_cast<long long>(edge_cover_count(OrientedEdge{origin, k}, m, n, d, L));
    const std::string axis = "axis" + std::to_string(k);
    if (k == 0) add("edge_cover_vertical", "==", base + n, count);
    else add("edge_cover_" + axis, "==", base, count);
    add("sandwich_lower_" + axis, ">=", base, count);
    add("sandwich_upper_" + axis, "<=", base + n, count);
  }
  for (PairShape shape : all_pair_shapes()) {
    if (shape == PairShape::corner_nonvertical && d < 3) continue;
    long long expected = 0;
    switch (shape) {
      case PairShape::colinear_nonvertical: expected = colinear; break;
      case PairShape::corner_nonvertical:
      case PairShape::vertical_head_head:
      case PairShape::horizontal_into_vertical:
      case PairShape::vertical_tail_tail: expected = corner; break;
      case PairShape::vertical_into_horizontal: expected = corner + 1; break;
      case PairShape::colinear_vertical: expected = colinear + n; break;
    }
    add("pair_" + to_string(shape), "==", expected, static_cast<long long>(pair_cover_count(shape, m, n, d, L)));
  }
  if (!inject_fault.empty() &&
      std::none_of(table.rows.begin(), table.rows.end(), [&](const AuditRow& r) { return r.check == inject_fault; }))
    throw UsageError("unknown audit check '" + inject_fault + "'");
  return table;
}

namespace {

// Two-site operator h on sites (tail, head) of a three-site space.
Eigen::MatrixXd embed3(const TwoSiteOperator& h, int q, int tail, int head) {
  const int dim = q * q * q;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  const int stride[3] = {q * q, q, 1};
  const int other = 3 - tail - head;
  for (int col = 0; col < dim; ++col) {
    const int s[3] = {col / (q * q), (col / q) % q, col % q};
    for (int x = 0; x < q; ++x) {
      for (int y = 0; y < q; ++y) {
        const double v = h(x * q + y, s[tail] * q + s[head]);
        if (v == 0.0) continue;
        const int row = x * stride[tail] + y * stride[head] + s[other] * stride[other];
        out(row, col) += v;
      }
    }
  }
  return out;
}

}  // namespace

CauchySchwarzResult cauchy_schwarz_audit(const AnisotropyModel& model, double tol) {
  const int d = model.dim(), q = model.local_dim();
  std::vector<TwoSiteOperator> h;
  for (int k = 0; k < d; ++k) h.push_back(build_interaction(model, k));

  CauchySchwarzResult out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  // Site 1 is shared. first_out: first edge points into the shared site
  // (0 -> 1) or out of it (1 -> 0); likewise second_out for (1 -> 2) vs (2 -> 1).
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int first_out = 0; first_out < 2; ++first_out) {
        for (int second_out = 0; second_out < 2; ++second_out) {
          // Two distinct edges along one axis can only meet head to tail.
          if (a == b && first_out == second_out) continue;
          const Eigen::MatrixXd e = first_out ? embed3(h[a], q, 1, 0) : embed3(h[a], q, 0, 1);
          const Eigen::MatrixXd f = second_out ? embed3(h[b], q, 1, 2) : embed3(h[b], q, 2, 1);
          const Eigen::MatrixXd sum = e + f + e * f + f * e;
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum, Eigen::EigenvaluesOnly);
          out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues()(0));
          ++out.cases;
        }
      }
    }
  }
  out.pass = out.min_eigenvalue >= -tol;
  return out;
}

CauchySchwarzResult cauchy_schwarz_random(int d, int n, double delta, int trials, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CauchySchwarzResult out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    std::vector<double> lambda(static_cast<std::size_t>(n * d));
    for (int i = 1; i <= n; ++i)
      for (int k = 0; k < d; ++k)
        lambda[static_cast<std::size_t>((i - 1) * d + k)] = std::pow(delta, i) * std::pow(2.0, u(rng));
    const CauchySchwarzResult r = cauchy_schwarz_audit(AnisotropyModel(d, n, delta, lambda), tol);
    out.min_eigenvalue = std::min(out.min_eigenvalue, r.min_eigenvalue);
    out.cases += r.cases;
  }
  out.pass = out.min_eigenvalue >= -tol;
  return out;
}

}  // namespace pvbs
