// hktl: batch verification of hyperKahler structures built from harmonic
// potentials, their twists and deformations, and monopole flux integrals.
//
//   hktl verify <config.json> [--seed N] [--samples N] [--out report.json]
//                             [--csv points.csv] [--tolerance-pde X]
//   hktl flux   <config.json> [--out report.json]
//
// Exit codes: 0 all checks pass, 1 check failure, 2 config error,
// 3 runtime numeric error, 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hktl/runner.hpp"
#include "hktl/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hktl::IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_error(const hktl::Error& e) {
  std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
  if (!e.point.empty()) {
    std::cerr << "  at point [";
    for (size_t i = 0; i < e.point.size(); ++i)
      std::cerr << (i ? ", " : "") << hktl::detail::fmt_double(e.point[i]);
    std::cerr << "]\n";
  }
}

int exit_code_for(const hktl::Error& e) {
  if (dynamic_cast<const hktl::ConfigError*>(&e)) return hktl::kExitConfigError;
  if (dynamic_cast<const hktl::IoError*>(&e)) return hktl::kExitIoError;
  return hktl::kExitNumericError;
}

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  std::optional<double> tolerance_pde;
};

hktl::JobConfig load_config(const CommonArgs& args) {
  hktl::JobConfig cfg = hktl::parse_job_config(read_file(args.config_path));
  if (args.seed) cfg.samples.seed = *args.seed;
  if (args.samples) cfg.samples.count = *args.samples;
  if (args.out) cfg.report_path = *args.out;
  if (args.csv) cfg.csv_path = *args.csv;
  if (args.tolerance_pde) {
    if (*args.tolerance_pde <= 0) throw hktl::ConfigError("--tolerance-pde must be positive");
    cfg.tolerances.pde = *args.tolerance_pde;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "job configuration (JSON)")->required();
  cmd->add_option("--seed", args.seed, "override the sample seed");
  cmd->add_option("--samples", args.samples, "override the sample count");
  cmd->add_option("--out", args.out, "write the JSON report here");
  cmd->add_option("--csv", args.csv, "write per-point residuals here");
  cmd->add_option("--tolerance-pde", args.tolerance_pde, "override the PDE residual tolerance");
}

int cmd_verify(const CommonArgs& args) {
  const hktl::JobConfig cfg = load_config(args);
  const hktl::RunResult result = hktl::run_verify(cfg);
  for (const auto& c : result.report.checks) {
    std::printf("[%s] %-28s max %.3e mean %.3e (n=%ld, tol %.1e)  %s\n",
                c.pass ? "PASS" : "FAIL", c.name.c_str(), c.max, c.mean, c.count, c.tolerance,
                c.anchor.c_str());
  }
  hktl::write_outputs(cfg, result.report);
  return result.exit_code;
}

int cmd_flux(const CommonArgs& args) {
  const hktl::JobConfig cfg = load_config(args);
  const hktl::FluxResult r = hktl::run_flux(cfg);
  std::printf("flux %.6f nearest %ld deviation %.3e  %s\n", r.flux, r.nearest, r.deviation,
              r.pass ? "PASS" : "FAIL");
  if (cfg.report_path) {
    hktl::ResidualReport report;
    report.seed = cfg.samples.seed;
    hktl::ResidualCheck c;
    c.name = "chern_flux";
    c.anchor = "-(1/2pi) oint *3 dh is an integer";
    c.tolerance = 1e-3;
    c.max = r.deviation;
    c.mean = r.deviation;
    c.count = 1;
    c.pass = r.pass;
    c.details["flux"] = r.flux;
    c.details["nearest"] = static_cast<double>(r.nearest);
    report.checks.push_back(std::move(c));
    hktl::write_text_file(*cfg.report_path, hktl::emit_report_json(report));
  }
  return r.pass ? hktl::kExitPass : hktl::kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperKahler twist verification toolkit"};
  app.set_version_flag("--version", hktl::kVersion);
  app.require_subcommand(1);

  CommonArgs verify_args, flux_args;
  CLI::App* verify = app.add_subcommand("verify", "run the configured residual checks");
  add_common(verify, verify_args);
  CLI::App* flux = app.add_subcommand("flux", "evaluate the spherical flux integral");
  add_common(flux, flux_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : hktl::kExitConfigError;
  }

  try {
    if (verify->parsed()) return cmd_verify(verify_args);
    if (flux->parsed()) return cmd_flux(flux_args);
  } catch (const hktl::Error& e) {
    print_error(e);
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hktl::kExitNumericError;
  }
  return hktl::kExitConfigError;
}
