#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace pvbs::cli;
  CLI::App app{"PVBS spin model spectral gaps and finite-size certificates"};
  std::string command, config_path, out_path, format = "json", inject_fault;
  std::optional<int> m;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  app.add_option("command", command, "validate | gap | certify | sweep | audit")
      ->required()
      ->check(CLI::IsMember({"validate", "gap", "certify", "sweep", "audit"}));
  app.add_option("--config", config_path, "JSON job file")->required();
  app.add_option("--m", m, "box side of C_m");
  app.add_option("--seed", seed, "Krylov start-vector seed");
  app.add_option("--workers", workers, "sector solves in parallel (0 = all cores)");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--inject-fault", inject_fault, "audit: perturb the named check (test hook)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParseError;
  }

  RunOptions opts;
  opts.m = m;
  opts.seed = seed;
  opts.workers = workers;
  opts.format = format == "csv" ? Format::csv : Format::json;
  opts.inject_fault = inject_fault;
  try {
    apply_environment(opts);
  } catch (const pvbs::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kParseError;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "config error: cannot read " << config_path << "\n";
    return kParseError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  if (out_path.empty()) return run_command(command, text.str(), opts, std::cout, std::cerr);
  std::ostringstream report;
  const int rc = run_command(command, text.str(), opts, report, std::cerr);
  std::ofstream file(out_path);
  if (!file) {
    std::cerr << "cannot write " << out_path << "\n";
    return kParseError;
  }
  file << report.str();
  return rc;
}
