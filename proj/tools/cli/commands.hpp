#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "cli/config.hpp"
#include "json.hpp"
#include "pvbs/criterion.hpp"
#include "pvbs/spectra.hpp"

namespace pvbs::cli {

/// Public exit-code contract.
enum ExitCode : int {
  kOk = 0,
  kInconclusive = 1,
  kInvalidModel = 2,
  kParseError = 3,
  kUnresolved = 4,
  kCapacity = 5,
  kAuditFailure = 6,
};

enum class Format { json, csv };

struct RunOptions {
  std::optional<int> m;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  Format format = Format::json;
  std::string inject_fault;  // audit test hook
  OperatorLimits limits;
  RegionLimits region_limits;
};

/// Capacity overrides from PVBS_DENSE_CAP and PVBS_MAX_SITES. ConfigError on
/// malformed values.
void apply_environment(RunOptions& opts);

nlohmann::ordered_json model_json(const AnisotropyModel& model);
nlohmann::ordered_json region_json(const Region& region);
nlohmann::ordered_json spectral_json(const SpectralReport& rep);
nlohmann::ordered_json certificate_json(const CertificateReport& cert);

/// Each command writes its report to `out` and returns the exit code;
/// diagnostics go to `err`. Errors from the core library propagate.
int cmd_validate(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gap(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_certify(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_audit(const JobConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Dispatch by name with error-to-exit-code mapping. Loads the config from
/// `config_text`.
int run_command(const std::string& command, const std::string& config_text, const RunOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace pvbs::cli
