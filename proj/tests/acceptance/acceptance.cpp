// Acceptance suite: one PASS/FAIL line per criterion. Criterion 10 reruns
// 1-9 with a different worker count and compares the JSON reports byte for byte.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "json.hpp"
#include "pvbs/criterion.hpp"
#include "pvbs/gsoracle.hpp"
#include "pvbs/hamiltonian.hpp"
#include "pvbs/spectra.hpp"

using namespace pvbs;
using ojson = nlohmann::ordered_json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  ojson report = ojson::object();
  std::vector<double> eigenvalues;  // compared across worker counts
};

struct Context {
  unsigned workers = 1;
};

ReportOptions options(const Context& ctx) {
  ReportOptions o;
  o.workers = ctx.workers;
  return o;
}

void fail(Outcome& out, const std::string& why) {
  out.detail += (out.pass ? "" : "; ") + why;
  out.pass = false;
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

void collect(Outcome& out, const SpectralReport& rep) {
  out.eigenvalues.push_back(rep.gap);
  for (const auto& s : rep.sectors) out.eigenvalues.insert(out.eigenvalues.end(), s.lowest.begin(), s.lowest.end());
}

std::string tag(const char* prefix, int n, int m) {
  return std::string(prefix) + "_n" + std::to_string(n) + "_m" + std::to_string(m);
}

// Configurations carrying the support of the kernel vectors.
std::set<Config> kernel_support(const Region& region, int n, const SpectralReport& rep) {
  std::set<Config> out;
  for (const auto& s : rep.sectors) {
    if (s.kernel_dim == 0) continue;
    const auto configs = enumerate_sector(region, n, Sector{s.occupation});
    for (Eigen::Index j = 0; j < s.kernel_vectors.cols(); ++j)
      for (Eigen::Index i = 0; i < s.kernel_vectors.rows(); ++i)
        if (std::abs(s.kernel_vectors(i, j)) > 1e-12) out.insert(configs[static_cast<std::size_t>(i)]);
  }
  return out;
}

Outcome reference_gap(const Context& ctx) {
  Outcome out;
  auto check = [&](const std::string& name, const Region& region, int n) {
    const SpectralReport rep = spectral_report(region, AnisotropyModel::reference(2, n), options(ctx));
    double worst = 0;
    for (const auto& s : rep.sectors)
      for (double v : s.lowest) worst = std::max(worst, std::abs(v - std::round(v)));
    if (!(std::abs(rep.gap - 1.0) <= 1e-10))
      fail(out, name + ": gap " + num(rep.gap) + (rep.gap >= 1.0 && worst <= 1e-9 ? " (integer spectrum, gap >= 1)" : ""));
    if (!(worst <= 1e-9)) fail(out, name + ": eigenvalue off integer by " + num(worst));
    out.report[name] = cli::spectral_json(rep);
    collect(out, rep);
  };
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 3; ++m) check(tag("box_on_stick", n, m), build_box_on_stick(m, n, 2), n);
  for (int L = 1; L <= 2; ++L) check("torus_L" + std::to_string(L), build_torus(L, 2), 1);
  if (out.pass) out.detail = "gap 1 and integer spectra on 6 boxes on a stick and 2 tori";
  return out;
}

Outcome degeneracy(const Context& ctx) {
  Outcome out;
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m) {
      const Region region = build_box_on_stick(m, n, 2);
      const std::size_t want = std::size_t{1} << n;
      const SpectralReport ref = spectral_report(region, AnisotropyModel::reference(2, n), options(ctx));
      if (ref.kernel_dim != want) fail(out, tag("reference", n, m) + ": kernel " + std::to_string(ref.kernel_dim));
      out.report[tag("reference", n, m)] = cli::spectral_json(ref);
      collect(out, ref);
      for (double delta : {1e-3, 1e-2}) {
        const std::string name = tag("delta", n, m) + "_" + num(delta);
        const SpectralReport rep = spectral_report(region, AnisotropyModel::midpoint(2, n, delta), options(ctx));
        if (rep.kernel_dim != want) fail(out, name + ": kernel " + std::to_string(rep.kernel_dim));
        std::set<std::vector<int>> seen;
        for (const auto& s : rep.sectors) {
          if (s.kernel_dim == 0) continue;
          const bool subset = std::all_of(s.occupation.begin(), s.occupation.end(), [](int v) { return v <= 1; });
          if (s.kernel_dim != 1 || !subset) fail(out, name + ": kernel outside the subset sectors");
          seen.insert(s.occupation);
        }
        if (seen.size() != want) fail(out, name + ": kernel spread over " + std::to_string(seen.size()) + " sectors");
        if (!rep.gap_resolved) fail(out, name + ": gap not resolved");
        out.report[name] = cli::spectral_json(rep);
        collect(out, rep);
      }
    }
  if (out.pass) out.detail = "kernel dimension 2^n, one per subset sector, for n <= 3, m <= 2";
  return out;
}

Outcome oracle_equivalence(const Context& ctx) {
  Outcome out;
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m) {
      const Region region = build_box_on_stick(m, n, 2);
      ReportOptions o = options(ctx);
      o.keep_kernel_vectors = true;
      const SpectralReport rep = spectral_report(region, AnisotropyModel::reference(2, n), o);
      const auto oracle = reference_kernel_basis(m, n, 2);
      const std::set<Config> found = kernel_support(region, n, rep);
      const bool same = found == std::set<Config>(oracle.begin(), oracle.end()) && oracle.size() == rep.kernel_dim;
      if (!same) fail(out, tag("kernel", n, m) + ": index sets differ");
      out.report[tag("kernel", n, m)] = std::vector<Config>(found.begin(), found.end());
    }
  for (int n = 1; n <= 6; ++n) {
    const std::size_t count = enumerate_stick_sequences(n).size();
    if (count != (std::size_t{1} << n)) fail(out, "n = " + std::to_string(n) + ": " + std::to_string(count) + " sequences");
    out.report["stick_sequences"].push_back(count);
  }
  if (out.pass) out.detail = "kernel index sets match the oracle; 2^n stick sequences for n <= 6";
  return out;
}

Outcome prop_verify(const Context& ctx) {
  Outcome out;
  const double margin = 1e-6;
  for (int m = 2; m <= 3; ++m) {
    double previous = -1;
    ojson rows = ojson::array();
    for (double delta : {1e-3, 3e-4, 1e-4}) {
      const PropVerifyResult r = prop_verify_check(AnisotropyModel::midpoint(2, 1, delta), m, options(ctx), margin);
      if (!r.pass) fail(out, "m = " + std::to_string(m) + ", delta = " + num(delta) + ": gap " + num(r.gamma) +
                                 " vs bound " + num(r.bound));
      if (!(r.gamma > previous)) fail(out, "m = " + std::to_string(m) + ": gap not increasing as delta decreases");
      previous = r.gamma;
      rows.push_back({{"delta", delta}, {"gap", r.gamma}, {"bound", r.bound}, {"pass", r.pass}});
      collect(out, r.report);
    }
    out.report["m" + std::to_string(m)] = rows;
  }
  if (out.pass) out.detail = "gap > 1 - 3 C delta + 1e-6 for m in {2,3}, gap increasing toward 1";
  return out;
}

Outcome perturbation_bound(const Context&) {
  Outcome out;
  int printed_held = 0, cases = 0;
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m)
      for (double delta : {1e-2, 1e-3}) {
        const PerturbationNormResult r = perturbation_norm_check(AnisotropyModel::midpoint(2, n, delta), m);
        ++cases;
        printed_held += r.within_printed;
        const std::string name = tag("norm", n, m) + "_" + num(delta);
        if (!r.within_corrected) fail(out, name + ": " + num(r.norm) + " > " + num(r.bound_corrected));
        out.report[name] = {{"norm", r.norm},
                            {"bound_corrected", r.bound_corrected},
                            {"bound_printed", r.bound_printed},
                            {"within_corrected", r.within_corrected},
                            {"within_printed", r.within_printed}};
        out.eigenvalues.push_back(r.norm);
      }
  if (out.pass)
    out.detail = "corrected bound holds in " + std::to_string(cases) + "/" + std::to_string(cases) +
                 " cases; printed constant held in " + std::to_string(printed_held) + "/" + std::to_string(cases);
  return out;
}

Outcome square_identity(const Context&) {
  Outcome out;
  for (int m = 1; m <= 2; ++m) {
    const SquareDecomposition sq = build_QR(build_box_on_stick(m, 1, 2), AnisotropyModel::midpoint(2, 1, 0.05));
    const Eigen::MatrixXd H(sq.H), Q(sq.Q), R(sq.R);
    const Eigen::MatrixXd diff = H * H - H - Q - R;
    const double norm =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(diff, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    if (!(norm <= 1e-10)) fail(out, "C_" + std::to_string(m) + ": residual " + num(norm));
    out.report["C" + std::to_string(m)] = norm;
  }
  if (out.pass) out.detail = "|H^2 - H - Q - R| <= 1e-10 on C_1 and C_2";
  return out;
}

Outcome count_audits(const Context&) {
  Outcome out;
  int tables = 0;
  for (int m = 2; m <= 6; ++m)
    for (int n = 1; n <= 3; ++n)
      for (int d = 2; d <= 3; ++d) {
        const AuditTable t = audit_counts(m, n, d);
        ++tables;
        for (const auto& f : t.failures())
          fail(out, "(m, n, d) = (" + std::to_string(m) + ", " + std::to_string(n) + ", " + std::to_string(d) + "): " + f);
        ojson rows = ojson::array();
        for (const auto& r : t.rows) rows.push_back({r.check, r.expected, r.measured});
        out.report[std::to_string(m) + "_" + std::to_string(n) + "_" + std::to_string(d)] = rows;
      }
  if (out.pass) out.detail = "exact equality in all " + std::to_string(tables) + " audit tables";
  return out;
}

Outcome cauchy_schwarz(const Context&) {
  Outcome out;
  double worst = INFINITY;
  for (int d = 2; d <= 3; ++d)
    for (int n = 1; n <= 3; ++n) {
      for (const CauchySchwarzResult& r :
           {cauchy_schwarz_audit(AnisotropyModel::midpoint(d, n, 0.01)), cauchy_schwarz_random(d, n, 0.05, 100, 1000 + n)}) {
        worst = std::min(worst, r.min_eigenvalue);
        if (!r.pass) fail(out, "d = " + std::to_string(d) + ", n = " + std::to_string(n) + ": min " + num(r.min_eigenvalue));
      }
      const CauchySchwarzResult ref = cauchy_schwarz_audit(AnisotropyModel::reference(d, n));
      if (ref.min_eigenvalue < 0) fail(out, "reference model gives " + num(ref.min_eigenvalue));
    }
  out.report["min_eigenvalue"] = worst;
  out.eigenvalues.push_back(worst);
  if (out.pass) out.detail = "min eigenvalue " + num(worst) + " >= -1e-12 (d in {2,3}, n <= 3, 100 random tables each)";
  return out;
}

Outcome arithmetic(const Context& ctx) {
  Outcome out;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  if (threshold(16, 2, 1) != 0.1875) fail(out, "threshold(16,2,1) = " + num(threshold(16, 2, 1)));
  if (!(std::abs(gap_lower_bound(1, 16, 2, 1) - 256.0 / 290.0 * 0.8125) <= 1e-12)) fail(out, "gap_lower_bound(1,16,2,1)");
  const double cdn = (1.0 - 3.0 / 16.0) / (96.0 * 17.0 * 17.0);
  if (!(rel(c_dn(2, 1), cdn) <= 1e-9) || !(rel(c_dn(2, 1), 2.9287e-5) <= 5e-5)) fail(out, "c_dn(2,1) = " + num(c_dn(2, 1)));
  const auto dc = delta_condition(16, 2, 1);
  if (!dc || !(rel(*dc, (1.0 - 0.1875) / (3.0 * 8 * 290 * 2)) <= 1e-9) || !(rel(*dc, 5.836e-5) <= 5e-4))
    fail(out, "delta_condition(16,2,1)");
  // m < 4: the criterion does not apply, whatever the gap.
  const CertificateReport measured = certify(AnisotropyModel::reference(2, 1), 3, options(ctx));
  const CertificateReport external = certify_external(AnisotropyModel::midpoint(2, 1, 1e-3), 3, 100.0);
  if (measured.verdict != Verdict::inconclusive || external.verdict != Verdict::inconclusive) fail(out, "certify accepted m = 3");
  out.report = {{"threshold", threshold(16, 2, 1)},
                {"gap_lower_bound", gap_lower_bound(1, 16, 2, 1)},
                {"c_dn", c_dn(2, 1)},
                {"delta_condition", *dc},
                {"certify_m3", cli::certificate_json(measured)}};
  if (out.pass) out.detail = "threshold, bound, c_{2,1}, delta condition; m = 3 certificates refused";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(const Context&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "reference gap = 1", reference_gap},
      {2, "ground-state degeneracy 2^n", degeneracy},
      {3, "oracle equivalence", oracle_equivalence},
      {4, "gap above 1 - 3 C delta", prop_verify},
      {5, "perturbation norm", perturbation_bound},
      {6, "squared-Hamiltonian identity", square_identity},
      {7, "count audits", count_audits},
      {8, "operator Cauchy-Schwarz", cauchy_schwarz},
      {9, "criterion arithmetic", arithmetic},
  };

  bool all = true;
  std::vector<Outcome> first;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(Context{1});
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    all &= o.pass;
    first.push_back(std::move(o));
  }

  // Same criteria again with three workers.
  bool same = true;
  std::string why = "JSON reports byte-identical and eigenvalues equal with 1 and 3 workers";
  double worst = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run(Context{3});
    } catch (const std::exception& e) {
      same = false;
      why = std::string("exception: ") + e.what();
      break;
    }
    if (o.report.dump() != first[i].report.dump()) {
      same = false;
      why = "criterion " + std::to_string(criteria[i].id) + ": reports differ";
    }
    if (o.eigenvalues.size() != first[i].eigenvalues.size()) {
      same = false;
      why = "criterion " + std::to_string(criteria[i].id) + ": eigenvalue counts differ";
      continue;
    }
    for (std::size_t k = 0; k < o.eigenvalues.size(); ++k) {
      const double a = o.eigenvalues[k], b = first[i].eigenvalues[k];
      if (a == b) continue;  // covers matching infinities
      worst = std::max(worst, std::abs(a - b));
    }
  }
  if (worst > 1e-12) {
    same = false;
    why = "eigenvalues differ by " + num(worst);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s criterion 10 (determinism): %s [%.1fs]\n", same ? "PASS" : "FAIL", why.c_str(), secs);
  all &= same;
  return all ? 0 : 1;
}
