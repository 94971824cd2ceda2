#include "cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pvbs::cli {

namespace {

using json = nlohmann::json;

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key at " + where + "/" + key);
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value at " + where + "/" + key);
  }
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("expected an integer at " + where + "/" + key);
  return v.get<int>();
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("expected a number at " + where + "/" + key);
  return v.get<double>();
}

RegionSpec parse_region(const json& r) {
  if (!r.is_object()) throw ConfigError("expected an object at /region");
  reject_unknown(r, {"kind", "m", "L", "stick", "points"}, "/region");
  RegionSpec spec;
  if (!r.contains("kind")) throw ConfigError("missing key /region/kind");
  spec.kind = get_as<std::string>(r, "kind", "/region");
  static const std::set<std::string> kinds{"box_on_stick", "box", "stick", "torus", "custom"};
  if (!kinds.count(spec.kind)) throw ConfigError("unknown region kind at /region/kind: " + spec.kind);
  if (r.contains("m")) spec.m = get_int(r, "m", "/region");
  if (r.contains("L")) spec.L = get_int(r, "L", "/region");
  if (r.contains("stick")) spec.stick = get_int(r, "stick", "/region");
  if (r.contains("points")) spec.points = get_as<std::vector<std::vector<int>>>(r, "points", "/region");
  return spec;
}

}  // namespace

JobConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("JSON syntax error at " + line_column(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("top level must be an object at 1:1");
  reject_unknown(doc,
                 {"d", "n", "delta", "lambda", "region", "m", "gamma_Cm", "deltas", "seed", "zero_tol", "margin",
                  "workers", "trials"},
                 "");
  for (const char* key : {"d", "n", "delta"})
    if (!doc.contains(key)) throw ConfigError(std::string("missing key /") + key);

  JobConfig cfg;
  cfg.d = get_int(doc, "d", "");
  cfg.n = get_int(doc, "n", "");
  cfg.delta = get_number(doc, "delta", "");
  if (doc.contains("lambda")) cfg.lambda = get_as<std::vector<std::vector<double>>>(doc, "lambda", "");
  if (doc.contains("region")) cfg.region = parse_region(doc.at("region"));
  if (doc.contains("m")) cfg.m = get_int(doc, "m", "");
  if (doc.contains("gamma_Cm")) cfg.gamma_Cm = get_number(doc, "gamma_Cm", "");
  if (doc.contains("deltas")) cfg.deltas = get_as<std::vector<double>>(doc, "deltas", "");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("expected a nonnegative integer at /seed");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("zero_tol")) cfg.zero_tol = get_number(doc, "zero_tol", "");
  if (doc.contains("margin")) cfg.margin = get_number(doc, "margin", "");
  if (doc.contains("workers")) {
    if (!doc.at("workers").is_number_unsigned()) throw ConfigError("expected a nonnegative integer at /workers");
    cfg.workers = doc.at("workers").get<unsigned>();
  }
  if (doc.contains("trials")) cfg.trials = get_int(doc, "trials", "");
  if (cfg.d < 1 || cfg.n < 1) throw ConfigError("d and n must be positive at /d, /n");
  return cfg;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::ordered_json to_json(const JobConfig& cfg) {
  nlohmann::ordered_json j;
  j["d"] = cfg.d;
  j["n"] = cfg.n;
  j["delta"] = cfg.delta;
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  if (cfg.region) {
    nlohmann::ordered_json r;
    r["kind"] = cfg.region->kind;
    if (cfg.region->m) r["m"] = *cfg.region->m;
    if (cfg.region->L) r["L"] = *cfg.region->L;
    if (cfg.region->stick) r["stick"] = *cfg.region->stick;
    if (!cfg.region->points.empty()) r["points"] = cfg.region->points;
    j["region"] = r;
  }
  if (cfg.m) j["m"] = *cfg.m;
  if (cfg.gamma_Cm) j["gamma_Cm"] = *cfg.gamma_Cm;
  j["deltas"] = cfg.deltas;
  j["seed"] = cfg.seed;
  if (cfg.zero_tol) j["zero_tol"] = *cfg.zero_tol;
  j["margin"] = cfg.margin;
  j["workers"] = cfg.workers;
  j["trials"] = cfg.trials;
  return j;
}

AnisotropyModel build_model(const JobConfig& cfg) {
  if (!cfg.lambda) {
    if (cfg.delta == 0.0) return AnisotropyModel::reference(cfg.d, cfg.n);
    return AnisotropyModel::midpoint(cfg.d, cfg.n, cfg.delta);
  }
  const auto& rows = *cfg.lambda;
  if (rows.size() != static_cast<std::size_t>(cfg.n)) throw ModelError("lambda table needs n rows");
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (row.size() != static_cast<std::size_t>(cfg.d)) throw ModelError("lambda table rows need d entries");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return AnisotropyModel(cfg.d, cfg.n, cfg.delta, flat);
}

Region build_region(const JobConfig& cfg, RegionLimits limits) {
  const RegionSpec spec = cfg.region.value_or(RegionSpec{});
  auto side = [&]() {
    if (spec.m) return *spec.m;
    if (cfg.m) return *cfg.m;
    throw UsageError("region needs a box side m");
  };
  if (spec.kind == "box_on_stick") return build_box_on_stick(side(), spec.stick.value_or(cfg.n), cfg.d, limits);
  if (spec.kind == "box") return build_box(side(), cfg.d, limits);
  if (spec.kind == "stick") {
    if (!spec.stick) throw UsageError("stick region needs /region/stick");
    return build_stick(*spec.stick, cfg.d, limits);
  }
  if (spec.kind == "torus") {
    if (!spec.L) throw UsageError("torus region needs /region/L");
    return build_torus(*spec.L, cfg.d, limits);
  }
  std::vector<LatticePoint> pts;
  for (const auto& p : spec.points) {
    if (p.size() != static_cast<std::size_t>(cfg.d)) throw UsageError("custom region points need d coordinates");
    pts.push_back(LatticePoint{p});
  }
  return Region::induced(cfg.d, std::move(pts), limits);
}

}  // namespace pvbs::cli
