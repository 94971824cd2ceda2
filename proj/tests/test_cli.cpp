#include <gtest/gtest.h>

#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "json.hpp"

using namespace pvbs;
using namespace pvbs::cli;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string& cmd, const std::string& config, RunOptions opts = {}) {
  std::ostringstream out, err;
  const int code = run_command(cmd, config, opts, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Config, ParsesAndRoundTrips) {
  const JobConfig c = parse_config(R"({"d": 2, "n": 2, "delta": 0.01, "m": 3, "seed": 7,
                                       "lambda": [[0.01, 0.02], [1e-4, 1e-4]],
                                       "region": {"kind": "torus", "L": 2}})");
  EXPECT_EQ(c.d, 2);
  EXPECT_EQ(c.seed, 7u);
  ASSERT_TRUE(c.region.has_value());
  EXPECT_EQ(c.region->kind, "torus");
  const JobConfig back = parse_config(to_json(c).dump());
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  const AnisotropyModel model = build_model(c);
  EXPECT_DOUBLE_EQ(model.lambda(1, 1), 0.02);
  EXPECT_EQ(build_region(c).num_sites(), 16u);
}

TEST(Config, ErrorsCarryLocation) {
  try {
    parse_config("{\"d\": 2,\n \"n\": }");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("2:"), std::string::npos) << e.what();
  }
  try {
    parse_config(R"({"d": 2, "n": 1, "delta": 0.1, "region": {"kind": "box", "wat": 1}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/region/wat"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config(R"({"d": 2, "n": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"d": "2", "n": 1, "delta": 0.1})"), ConfigError);
}

TEST(Config, DefaultRegionIsBoxOnStick) {
  const JobConfig c = parse_config(R"({"d": 2, "n": 2, "delta": 0.01, "m": 2})");
  const Region r = build_region(c);
  EXPECT_EQ(r.kind(), RegionKind::box_on_stick);
  EXPECT_EQ(r.num_sites(), 11u);
  EXPECT_THROW(build_region(parse_config(R"({"d": 2, "n": 2, "delta": 0.01})")), UsageError);
}

TEST(Cli, GapReport) {
  const Outcome r = run("gap", R"({"d": 2, "n": 1, "delta": 0.001, "m": 2})");
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["spectral"]["kernel_dim"], 2);
  EXPECT_NEAR(j["spectral"]["gap"].get<double>(), 0.998267951500167, 1e-9);
  EXPECT_EQ(j["region"]["sites"], 10);
  EXPECT_EQ(j["region"]["edges"], 13);
}

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(run("validate", R"({"d": 2, "n": 2, "delta": 0.01})").code, kOk);
  const Outcome bad = run("validate", R"({"d": 2, "n": 1, "delta": 0.05, "lambda": [[0.15, 0.05]]})");
  EXPECT_EQ(bad.code, kInvalidModel);
  EXPECT_FALSE(json::parse(bad.out)["validation"]["valid"].get<bool>());
  EXPECT_EQ(run("validate", R"({"d": 2, "n": 1, "delta": 0.05, "lambda": [[-1, 0.05]]})").code, kInvalidModel);
}

TEST(Cli, ParseErrors) {
  EXPECT_EQ(run("gap", "{").code, kParseError);
  EXPECT_EQ(run("gap", R"({"d": 2, "n": 1, "delta": 0.1, "x": 0})").code, kParseError);
  EXPECT_EQ(run("frobnicate", R"({"d": 2, "n": 1, "delta": 0.1})").code, kParseError);
  EXPECT_EQ(run("certify", R"({"d": 2, "n": 1, "delta": 0.1})").code, kParseError);  // no m
}

TEST(Cli, CertifyVerdicts) {
  const Outcome small = run("certify", R"({"d": 2, "n": 1, "delta": 0, "m": 3})");
  EXPECT_EQ(small.code, kInconclusive);
  EXPECT_EQ(json::parse(small.out)["certificate"]["verdict"], "inconclusive");

  const Outcome ext = run("certify", R"({"d": 2, "n": 1, "delta": 0.001, "m": 16, "gamma_Cm": 1.0})");
  ASSERT_EQ(ext.code, kOk) << ext.err;
  const json c = json::parse(ext.out)["certificate"];
  EXPECT_EQ(c["verdict"], "certified");
  EXPECT_EQ(c["provenance"], "external");
  EXPECT_NEAR(c["uniform_bound"].get<double>(), 0.71724, 1e-5);
  EXPECT_EQ(c["valid_for_L_at_least"], 33);
}

TEST(Cli, CapacityExit) {
  EXPECT_EQ(run("gap", R"({"d": 2, "n": 1, "delta": 0.01, "m": 7})").code, kCapacity);
  RunOptions o;
  o.limits.max_dimension = 10;
  EXPECT_EQ(run("gap", R"({"d": 2, "n": 1, "delta": 0.01, "m": 2})", o).code, kCapacity);
}

TEST(Cli, SweepCsv) {
  RunOptions o;
  o.format = Format::csv;
  const Outcome r = run("sweep", R"({"d": 2, "n": 1, "delta": 0.01, "m": 2, "deltas": [0.0001, 0.01, 0.001]})", o);
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0], "delta,C_mn,bound,gap,pass,resolved");
  EXPECT_EQ(all[1], "0.01,160,-3.8,,skipped,");
  EXPECT_EQ(all[2].rfind("0.001,160,0.52,", 0), 0u);
  EXPECT_NE(r.err.find("nondecreasing"), std::string::npos);
}

TEST(Cli, SweepJsonTrend) {
  const Outcome r = run("sweep", R"({"d": 2, "n": 1, "delta": 0.001, "m": 2, "deltas": [0.001, 0.0001]})");
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["trend"], "nondecreasing");
  EXPECT_LT(j["rows"][0]["gap"].get<double>(), j["rows"][1]["gap"].get<double>());
}

TEST(Cli, AuditAndFaultInjection) {
  const std::string cfg = R"({"d": 2, "n": 1, "delta": 0.01, "m": 3, "trials": 10})";
  const Outcome ok = run("audit", cfg);
  ASSERT_EQ(ok.code, kOk) << ok.err;
  EXPECT_TRUE(json::parse(ok.out)["pass"].get<bool>());
  RunOptions o;
  o.inject_fault = "pair_colinear_vertical";
  const Outcome bad = run("audit", cfg, o);
  EXPECT_EQ(bad.code, kAuditFailure);
  EXPECT_NE(bad.err.find("pair_colinear_vertical"), std::string::npos);
  o.inject_fault = "nonsense";
  EXPECT_EQ(run("audit", cfg, o).code, kParseError);
}

TEST(Cli, OutputIndependentOfWorkers) {
  const std::string cfg = R"({"d": 2, "n": 2, "delta": 0.01, "m": 1})";
  RunOptions one, four;
  four.workers = 4;
  const Outcome a = run("gap", cfg, one), b = run("gap", cfg, four);
  EXPECT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, EnvironmentOverrides) {
  RunOptions o;
  setenv("PVBS_MAX_SITES", "100", 1);
  setenv("PVBS_DENSE_CAP", "256", 1);
  apply_environment(o);
  EXPECT_EQ(o.region_limits.max_sites, 100u);
  EXPECT_EQ(o.limits.dense_cap, 256u);
  setenv("PVBS_DENSE_CAP", "lots", 1);
  EXPECT_THROW(apply_environment(o), ConfigError);
  unsetenv("PVBS_MAX_SITES");
  unsetenv("PVBS_DENSE_CAP");
}

TEST(Cli, ReferenceGapOnSmallBox) {
  const Outcome r = run("gap", R"({"d": 2, "n": 1, "delta": 0, "m": 2})");
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["spectral"]["gap"].get<double>(), 1.0);
  EXPECT_EQ(j["spectral"]["kernel_dim"], 2);
}

TEST(Cli, TorusRegion) {
  const Outcome r = run("gap", R"({"d": 2, "n": 1, "delta": 0.01, "region": {"kind": "torus", "L": 1}})");
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  std::uint64_t total = 0;
  for (const auto& s : j["spectral"]["sectors"]) total += s["size"].get<std::uint64_t>();
  EXPECT_EQ(total, 16u);
}

TEST(Cli, EmptySweepGrid) {
  RunOptions o;
  o.format = Format::csv;
  const Outcome r = run("sweep", R"({"d": 2, "n": 1, "delta": 0.01, "m": 2})", o);
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "delta,C_mn,bound,gap,pass,resolved\n");
}

TEST(Cli, ReportsReparse) {
  const Outcome r = run("certify", R"({"d": 2, "n": 1, "delta": 0.001, "m": 2})");
  ASSERT_EQ(r.code, kInconclusive);
  const json j = json::parse(r.out);
  EXPECT_EQ(json::parse(j.dump()), j);
  for (const char* key : {"m", "gamma_Cm", "threshold", "prefactor", "uniform_bound", "verdict"})
    EXPECT_TRUE(j["certificate"].contains(key)) << key;
}
