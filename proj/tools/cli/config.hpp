#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pvbs/errors.hpp"
#include "pvbs/interactions.hpp"
#include "pvbs/lattice.hpp"

namespace pvbs::cli {

/// Malformed or schema-violating job file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RegionSpec {
  std::string kind = "box_on_stick";  // box_on_stick | box | stick | torus | custom
  std::optional<int> m;               // box side
  std::optional<int> L;               // torus half side
  std::optional<int> stick;           // stick length; box_on_stick defaults to n
  std::vector<std::vector<int>> points;  // custom: induced subgraph on these points
};

struct JobConfig {
  int d = 0;
  int n = 0;
  double delta = 0.0;
  std::optional<std::vector<std::vector<double>>> lambda;  // n rows of d entries
  std::optional<RegionSpec> region;
  std::optional<int> m;
  std::optional<double> gamma_Cm;
  std::vector<double> deltas;
  std::uint64_t seed = 42;
  std::optional<double> zero_tol;
  double margin = 0.0;
  unsigned workers = 1;
  int trials = 100;
};

/// Strict parse: unknown keys, wrong types and missing d, n, delta are
/// ConfigErrors carrying a line:column or a JSON pointer.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

/// Canonical form: fixed key order, defaults written out.
nlohmann::ordered_json to_json(const JobConfig& cfg);

/// ModelError when the parameters do not define a model.
AnisotropyModel build_model(const JobConfig& cfg);

/// Region for commands that take one; box_on_stick(m, n, d) when the config
/// names none. UsageError if no box side is known.
Region build_region(const JobConfig& cfg, RegionLimits limits = {});

}  // namespace pvbs::cli
