#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvbs/interactions.hpp"
#include "pvbs/lattice.hpp"
#include "pvbs/spectra.hpp"

namespace pvbs {

/// 1/m + (8d/m^2)(1 + n/m^(d-2)).
double threshold(int m, int d, int n);
/// m^d / ((m+1)^d + n).
double prefactor(int m, int d, int n);
/// prefactor * (gamma - threshold); may be negative.
double gap_lower_bound(double gamma, int m, int d, int n);

/// Which box size enters c_{d,n} for d >= 3: the displayed formula uses
/// max{n^(1/(d-2)), 3d}, the proof text max{n^(1/(d-2)), 8d}. Both keep the
/// numerator 1 - 3/m. For d = 2 both variants give the m = 16n choice.
enum class CdnVariant { printed, proof_text };
std::string to_string(CdnVariant v);
/// The box size m behind c_{d,n}.
double cdn_box_size(int d, int n, CdnVariant v = CdnVariant::printed);
double c_dn(int d, int n, CdnVariant v = CdnVariant::printed);

/// 8((m+1)^d + n)(n^2 + n), with (m+1)^d + n standing for the edge count.
double C_mn(int m, int n, int d);
/// 16(n^2 + n)(d m (m+1)^(d-1) + n): same argument with the actual number of
/// edges of box_on_stick(m, n, d).
double C_mn_corrected(int m, int n, int d);

/// (1 - threshold) / (3 C_mn); nullopt when threshold >= 1 (no admissible delta).
std::optional<double> delta_condition(int m, int d, int n);

struct PropVerifyResult {
  double gamma = 0.0;
  double bound = 0.0;    // 1 - 3 C delta
  double product = 0.0;  // 3 C delta
  double margin = 0.0;
  bool resolved = false;
  bool pass = false;  // resolved and gamma > bound + margin
  SpectralReport report;
};

/// Measures the gap of H on box_on_stick(m, n, d) against 1 - 3 C_mn delta.
/// UsageError unless 0 < 3 C delta < 1.
PropVerifyResult prop_verify_check(const AnisotropyModel& model, int m, const ReportOptions& options = {},
                                   double margin = 0.0);

struct PerturbationNormResult {
  double norm = 0.0;             // |H - H_ref| on C_m
  double bound_corrected = 0.0;  // C_mn_corrected * delta
  double bound_printed = 0.0;      // C_mn * delta
  bool within_corrected = false;
  bool within_printed = false;
};

/// Sector-by-sector operator norm of H - H_ref on box_on_stick(m, n, d).
PerturbationNormResult perturbation_norm_check(const AnisotropyModel& model, int m,
                                               const SolverOptions& solver = {}, OperatorLimits limits = {},
                                               double slack = 1e-10);

enum class Verdict { certified, inconclusive, unresolved };
std::string to_string(Verdict v);

struct CertificateReport {
  int m = 0;
  int d = 0;
  int n = 0;
  double delta = 0.0;
  double gamma_Cm = 0.0;
  double threshold = 0.0;
  double prefactor = 0.0;
  double uniform_bound = 0.0;
  double margin = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string provenance;  // "measured" or "external"
  std::optional<SpectralReport> spectral;
};

/// Certificate from the measured gap of H on box_on_stick(m, n, d).
/// Certified iff m >= 4, the gap is resolved and gamma > threshold + margin.
/// A certificate asserts gamma_L >= uniform_bound for every L >= 2m + 1.
CertificateReport certify(const AnisotropyModel& model, int m, const ReportOptions& options = {},
                          double margin = 0.0);
/// Same arithmetic for a supplied gap value.
CertificateReport certify_external(const AnisotropyModel& model, int m, double gamma, double margin = 0.0);

struct AuditRow {
  std::string check;
  std::string relation;  // "==" or "<="
  long long expected = 0;
  long long measured = 0;
  bool pass = false;
};

struct AuditTable {
  std::vector<AuditRow> rows;
  bool pass() const;
  std::vector<std::string> failures() const;
};

/// Brute-force translate counts on the torus with L = 2m + 1 against the
/// closed forms of the counting argument. `inject_fault` names a check whose
/// measured value is perturbed by one (test hook).
AuditTable audit_counts(int m, int n, int d, const std::string& inject_fault = "");

struct CauchySchwarzResult {
  double min_eigenvalue = 0.0;
  std::size_t cases = 0;
  bool pass = false;  // min_eigenvalue >= -tol
};

/// min eigenvalue of h_e + h_f + {h_e, h_f} over adjacent edge pairs in every
/// orientation, assembled on three sites.
CauchySchwarzResult cauchy_schwarz_audit(const AnisotropyModel& model, double tol = 1e-12);
/// Same over `trials` random tables lambda_i^(k) = delta^i 2^u, u uniform in [-1, 1].
CauchySchwarzResult cauchy_schwarz_random(int d, int n, double delta, int trials, std::uint64_t seed,
                                          double tol = 1e-12);

}  // namespace pvbs
