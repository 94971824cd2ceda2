#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <set>

#include "pvbs/gsoracle.hpp"
#include "pvbs/hamiltonian.hpp"

namespace pvbs::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::size_t parse_env_size(const char* name, const char* value) {
  const std::string s(value);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || v == 0) throw ConfigError(std::string("bad value for ") + name + ": " + s);
  return static_cast<std::size_t>(v);
}

ReportOptions report_options(const JobConfig& cfg, const RunOptions& opts) {
  ReportOptions r;
  r.seed = opts.seed.value_or(cfg.seed);
  r.workers = opts.workers.value_or(cfg.workers);
  r.zero_tol = cfg.zero_tol;
  r.limits = opts.limits;
  return r;
}

int box_side(const JobConfig& cfg, const RunOptions& opts) {
  if (opts.m) return *opts.m;
  if (cfg.m) return *cfg.m;
  throw UsageError("this command needs m (config key or --m)");
}

ojson number_or_null(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

// Shortest text that round-trips.
std::string fmt(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_json(std::ostream& out, const ojson& j) { out << j.dump(2) << "\n"; }

struct CheckRow {
  std::string check;
  std::string relation;
  double expected = 0;
  double measured = 0;
  bool integral = false;
  bool pass = false;
};

bool evaluate(const CheckRow& r) {
  if (r.relation == "==") return r.measured == r.expected;
  if (r.relation == "<=") return r.measured <= r.expected;
  return r.measured >= r.expected;
}

ojson row_json(const CheckRow& r) {
  ojson j;
  j["check"] = r.check;
  j["relation"] = r.relation;
  if (r.integral) {
    j["expected"] = static_cast<long long>(r.expected);
    j["measured"] = static_cast<long long>(r.measured);
  } else {
    j["expected"] = r.expected;
    j["measured"] = r.measured;
  }
  j["pass"] = r.pass;
  return j;
}

// Packed configurations carrying the kernel of a diagonal-solved report.
std::set<Config> kernel_support(const Region& region, int species, const SpectralReport& rep) {
  std::set<Config> out;
  for (const auto& s : rep.sectors) {
    if (s.kernel_dim == 0) continue;
    const auto basis = enumerate_sector(region, species, Sector{s.occupation});
    for (Eigen::Index c = 0; c < s.kernel_vectors.cols(); ++c)
      for (Eigen::Index r = 0; r < s.kernel_vectors.rows(); ++r)
        if (std::abs(s.kernel_vectors(r, c)) > 0.5) out.insert(basis[static_cast<std::size_t>(r)]);
  }
  return out;
}

}  // namespace

void apply_environment(RunOptions& opts) {
  if (const char* v = std::getenv("PVBS_DENSE_CAP")) opts.limits.dense_cap = parse_env_size("PVBS_DENSE_CAP", v);
  if (const char* v = std::getenv("PVBS_MAX_SITES")) opts.region_limits.max_sites = parse_env_size("PVBS_MAX_SITES", v);
}

ojson model_json(const AnisotropyModel& model) {
  ojson j;
  j["d"] = model.dim();
  j["n"] = model.species();
  j["delta"] = model.delta();
  j["reference"] = model.is_reference();
  ojson table = ojson::array();
  for (int i = 1; i <= model.species(); ++i) {
    ojson row = ojson::array();
    for (int k = 0; k < model.dim(); ++k) row.push_back(model.lambda(i, k));
    table.push_back(row);
  }
  j["lambda"] = table;
  return j;
}

ojson region_json(const Region& region) {
  ojson j;
  j["kind"] = to_string(region.kind());
  j["d"] = region.dim();
  switch (region.kind()) {
    case RegionKind::torus: j["L"] = region.torus_half_side().value_or(0); break;
    case RegionKind::box: j["m"] = region.box_side(); break;
    case RegionKind::stick: j["stick"] = region.stick_length(); break;
    case RegionKind::box_on_stick:
      j["m"] = region.box_side();
      j["stick"] = region.stick_length();
      break;
    case RegionKind::custom: break;
  }
  j["sites"] = region.num_sites();
  j["edges"] = region.num_edges();
  return j;
}

ojson spectral_json(const SpectralReport& rep) {
  ojson j;
  j["kernel_dim"] = rep.kernel_dim;
  j["gap"] = number_or_null(rep.gap);
  j["zero_tol"] = rep.zero_tol;
  j["resolved"] = rep.gap_resolved;
  j["converged"] = rep.converged;
  j["unresolved"] = rep.unresolved;
  ojson sectors = ojson::array();
  for (const auto& s : rep.sectors) {
    ojson e;
    e["occupation"] = s.occupation;
    e["size"] = s.size;
    e["method"] = to_string(s.method);
    e["kernel_dim"] = s.kernel_dim;
    e["lowest"] = s.lowest;
    e["converged"] = s.converged;
    if (s.method == SolveMethod::krylov || s.method == SolveMethod::bounded) {
      e["residual"] = s.residual;
      e["lower_bound"] = s.lower_bound;
    }
    sectors.push_back(e);
  }
  j["sectors"] = sectors;
  return j;
}

ojson certificate_json(const CertificateReport& c) {
  ojson j;
  j["m"] = c.m;
  j["d"] = c.d;
  j["n"] = c.n;
  j["delta"] = c.delta;
  j["gamma_Cm"] = number_or_null(c.gamma_Cm);
  j["threshold"] = c.threshold;
  j["prefactor"] = c.prefactor;
  j["uniform_bound"] = number_or_null(c.uniform_bound);
  j["margin"] = c.margin;
  j["verdict"] = to_string(c.verdict);
  j["provenance"] = c.provenance;
  j["valid_for_L_at_least"] = 2 * c.m + 1;
  return j;
}

int cmd_validate(const JobConfig& cfg, const RunOptions&, std::ostream& out, std::ostream& err) {
  const AnisotropyModel model = build_model(cfg);
  const ValidationReport v = validate_anisotropy(model);
  ojson j;
  j["model"] = model_json(model);
  ojson viol = ojson::array();
  for (const auto& w : v.violations) {
    viol.push_back({{"species", w.species}, {"axis", w.axis}, {"value", w.value}, {"lower", w.lower}, {"upper", w.upper}});
    err << "lambda_" << w.species << "^(" << w.axis << ") = " << w.value << " outside [" << w.lower << ", " << w.upper
        << "]\n";
  }
  ojson windows = ojson::array();
  for (const auto& r : v.ratios)
    windows.push_back({{"axis", r.axis},
                       {"lower_species", r.lower_species},
                       {"upper_species", r.upper_species},
                       {"ratio", r.ratio},
                       {"lower", r.lower},
                       {"upper", r.upper},
                       {"inside", r.inside}});
  j["validation"] = {{"valid", v.valid()}, {"violations", viol}, {"ratio_windows", windows}};
  write_json(out, j);
  return v.valid() ? kOk : kInvalidModel;
}

int cmd_gap(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const AnisotropyModel model = build_model(cfg);
  const Region region = build_region(cfg, opts.region_limits);
  const SpectralReport rep = spectral_report(region, model, report_options(cfg, opts));
  ojson j;
  j["model"] = model_json(model);
  j["region"] = region_json(region);
  j["spectral"] = spectral_json(rep);
  write_json(out, j);
  if (!rep.gap_resolved) {
    err << "gap not resolved";
    if (!rep.converged) err << ": " << rep.unresolved.size() << " sector(s) did not converge";
    err << "\n";
    return kUnresolved;
  }
  return kOk;
}

int cmd_certify(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const AnisotropyModel model = build_model(cfg);
  const int m = box_side(cfg, opts);
  // A supplied gap needs no state space, so the site cap does not apply.
  RegionLimits limits = opts.region_limits;
  if (cfg.gamma_Cm) limits.max_sites = std::numeric_limits<std::size_t>::max();
  const Region region = build_box_on_stick(m, cfg.n, cfg.d, limits);
  const CertificateReport cert = cfg.gamma_Cm ? certify_external(model, m, *cfg.gamma_Cm, cfg.margin)
                                              : certify(model, m, report_options(cfg, opts), cfg.margin);
  ojson j;
  j["model"] = model_json(model);
  j["region"] = region_json(region);
  if (cert.spectral) j["spectral"] = spectral_json(*cert.spectral);
  j["certificate"] = certificate_json(cert);
  write_json(out, j);
  switch (cert.verdict) {
    case Verdict::certified: return kOk;
    case Verdict::inconclusive:
      if (m < 4) err << "m = " << m << " < 4: the criterion does not apply\n";
      return kInconclusive;
    case Verdict::unresolved: err << "gap not resolved\n"; return kUnresolved;
  }
  return kUnresolved;
}

int cmd_sweep(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  if (cfg.lambda) throw UsageError("sweep uses the default table lambda_i = delta^i; drop /lambda");
  const int m = box_side(cfg, opts);
  build_box_on_stick(m, cfg.n, cfg.d, opts.region_limits);
  std::vector<double> grid = cfg.deltas;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  const double C = C_mn(m, cfg.n, cfg.d);

  ojson rows = ojson::array();
  bool any_unresolved = false, any_fail = false, monotone = true;
  double previous_gap = -std::numeric_limits<double>::infinity();
  if (opts.format == Format::csv) out << "delta,C_mn,bound,gap,pass,resolved\n";
  for (double delta : grid) {
    const double product = 3.0 * C * delta;
    ojson row;
    row["delta"] = delta;
    row["C_mn"] = C;
    row["bound"] = 1.0 - product;
    if (!(delta > 0.0) || !(product < 1.0)) {
      row["gap"] = nullptr;
      row["pass"] = "skipped";
      row["resolved"] = nullptr;
      err << "delta = " << fmt(delta) << " skipped: 3 C delta = " << fmt(product) << " is not in (0, 1)\n";
      if (opts.format == Format::csv) out << fmt(delta) << "," << fmt(C) << "," << fmt(1.0 - product) << ",,skipped,\n";
      rows.push_back(row);
      continue;
    }
    const PropVerifyResult r =
        prop_verify_check(AnisotropyModel::midpoint(cfg.d, cfg.n, delta), m, report_options(cfg, opts), cfg.margin);
    row["gap"] = number_or_null(r.gamma);
    row["pass"] = r.pass;
    row["resolved"] = r.resolved;
    if (!r.resolved) any_unresolved = true;
    else if (!r.pass) any_fail = true;
    if (r.resolved) {
      if (r.gamma < previous_gap) monotone = false;
      previous_gap = r.gamma;
    }
    if (opts.format == Format::csv)
      out << fmt(delta) << "," << fmt(C) << "," << fmt(r.bound) << "," << fmt(r.gamma) << ","
          << (r.pass ? "true" : "false") << "," << (r.resolved ? "true" : "false") << "\n";
    rows.push_back(row);
  }
  const char* trend = monotone ? "nondecreasing" : "not_monotone";
  if (opts.format == Format::json) {
    ojson j;
    j["model"] = {{"d", cfg.d}, {"n", cfg.n}, {"lambda", "delta^i"}};
    j["m"] = m;
    j["rows"] = rows;
    j["trend"] = trend;
    write_json(out, j);
  } else {
    err << "trend: gap " << trend << " as delta decreases\n";
  }
  if (any_unresolved) return kUnresolved;
  return any_fail ? kInconclusive : kOk;
}

int cmd_audit(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const AnisotropyModel model = build_model(cfg);
  const int m = opts.m.value_or(cfg.m.value_or(4));
  std::vector<CheckRow> rows;
  std::vector<std::string> skipped;

  for (const auto& r : audit_counts(m, cfg.n, cfg.d).rows)
    rows.push_back({r.check, r.relation, static_cast<double>(r.expected), static_cast<double>(r.measured), true, r.pass});

  const CauchySchwarzResult cs = cauchy_schwarz_audit(model);
  rows.push_back({"cauchy_schwarz_model", ">=", -1e-12, cs.min_eigenvalue, false, cs.pass});
  if (cfg.delta > 0.0) {
    const CauchySchwarzResult rnd =
        cauchy_schwarz_random(cfg.d, cfg.n, cfg.delta, cfg.trials, opts.seed.value_or(cfg.seed));
    rows.push_back({"cauchy_schwarz_random", ">=", -1e-12, rnd.min_eigenvalue, false, rnd.pass});
  }

  for (int mm = 1; mm <= 2; ++mm) {
    const std::string tag = "C" + std::to_string(mm);
    const Region region = build_box_on_stick(mm, cfg.n, cfg.d, opts.region_limits);
    const StateSpace space(region.num_sites(), cfg.n);
    if (space.dimension() <= opts.limits.dense_cap) {
      const SquareDecomposition sq = build_QR(region, model, opts.limits);
      const SparseOperator diff = SparseOperator(sq.H * sq.H) - sq.H - sq.Q - sq.R;
      const double err_norm = symmetric_norm_bound(diff);
      rows.push_back({"square_identity_" + tag, "<=", 1e-10, err_norm, false, err_norm <= 1e-10});
    } else {
      skipped.push_back("square_identity_" + tag);
    }
    if (space.dimension() <= opts.limits.max_dimension) {
      ReportOptions ro = report_options(cfg, opts);
      ro.keep_kernel_vectors = true;
      const SpectralReport rep = spectral_report(region, AnisotropyModel::reference(cfg.d, cfg.n), ro);
      const auto oracle = reference_kernel_basis(mm, cfg.n, cfg.d);
      const auto found = kernel_support(region, cfg.n, rep);
      const bool same = std::set<Config>(oracle.begin(), oracle.end()) == found;
      rows.push_back({"oracle_kernel_dim_" + tag, "==", static_cast<double>(oracle.size()),
                      static_cast<double>(rep.kernel_dim), true, oracle.size() == rep.kernel_dim});
      rows.push_back({"oracle_kernel_match_" + tag, "==", 1.0, same ? 1.0 : 0.0, true, same});
    } else {
      skipped.push_back("oracle_kernel_" + tag);
    }
  }

  if (!opts.inject_fault.empty()) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const CheckRow& r) { return r.check == opts.inject_fault; });
    if (it == rows.end()) throw UsageError("unknown audit check '" + opts.inject_fault + "'");
    it->measured += 1.0;
    it->pass = evaluate(*it);
  }

  bool all = true;
  for (const auto& r : rows) {
    if (!r.pass) {
      all = false;
      err << "audit failure: " << r.check << " expected " << r.relation << " " << fmt(r.expected) << ", measured "
          << fmt(r.measured) << "\n";
    }
  }
  if (opts.format == Format::csv) {
    out << "check,relation,expected,measured,pass\n";
    for (const auto& r : rows)
      out << r.check << "," << r.relation << "," << fmt(r.expected) << "," << fmt(r.measured) << ","
          << (r.pass ? "true" : "false") << "\n";
  } else {
    ojson j;
    j["model"] = model_json(model);
    j["m"] = m;
    ojson checks = ojson::array();
    for (const auto& r : rows) checks.push_back(row_json(r));
    j["checks"] = checks;
    j["skipped"] = skipped;
    j["pass"] = all;
    write_json(out, j);
  }
  return all ? kOk : kAuditFailure;
}

int run_command(const std::string& command, const std::string& config_text, const RunOptions& opts,
                std::ostream& out, std::ostream& err) {
  try {
    const JobConfig cfg = parse_config(config_text);
    if (command == "validate") return cmd_validate(cfg, opts, out, err);
    if (command == "gap") return cmd_gap(cfg, opts, out, err);
    if (command == "certify") return cmd_certify(cfg, opts, out, err);
    if (command == "sweep") return cmd_sweep(cfg, opts, out, err);
    if (command == "audit") return cmd_audit(cfg, opts, out, err);
    err << "unknown command '" << command << "'\n";
    return kParseError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kParseError;
  } catch (const ModelError& e) {
    err << "invalid model: " << e.what() << "\n";
    return kInvalidModel;
  } catch (const CapacityError& e) {
    err << "capacity: " << e.what() << "\n";
    return kCapacity;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << " (residual " << e.residual() << ")\n";
    return kUnresolved;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
}

}  // namespace pvbs::cli
