#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsvf/cli/config.hpp"
#include "tsvf/cli/csv.hpp"
#include "tsvf/cli/run.hpp"
#include "tsvf/error.hpp"

namespace {

using tsvf::cli::Override;

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

const std::vector<std::string> kOverridePaths{
    "scenario.name",      "scenario.omega_mhz",          "scenario.k_khz",           "boundary.rho0",
    "boundary.effect_final", "grid.t_final",             "grid.dt",                  "observables",
    "modes",              "sweep.parameter",             "sweep.start",              "sweep.stop",
    "sweep.points",       "measurement.a",               "measurement.exact_correction",
    "measurement.jump_threshold", "measurement.jump_observable", "measurement.photon_convention", "output_dir"};

struct RunOptions {
  std::string config;
  std::string out;
  std::map<std::string, std::string> overrides;
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("--config", opts.config, "TOML configuration file (built-in defaults when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "Output directory (overrides output_dir)");
  for (const auto& path : kOverridePaths) {
    cmd->add_option("--" + path, opts.overrides[path], "Override " + path)->group("Config overrides");
  }
}

std::vector<Override> collect(const CLI::App* cmd, const RunOptions& opts) {
  std::vector<Override> out;
  for (const auto& path : kOverridePaths) {
    if (cmd->count("--" + path) > 0) out.push_back({path, opts.overrides.at(path)});
  }
  if (!opts.out.empty()) out.push_back({"output_dir", "'" + opts.out + "'"});
  return out;
}

tsvf::cli::RunConfig load(const RunOptions& opts, const std::vector<Override>& overrides) {
  if (!opts.config.empty()) return tsvf::cli::load_config(opts.config, overrides);
  std::vector<tsvf::cli::Diagnostic> diagnostics;
  tsvf::cli::RunConfig c = tsvf::cli::parse_config("", overrides, diagnostics, "<defaults>");
  if (!diagnostics.empty()) throw tsvf::cli::ConfigError(std::move(diagnostics));
  return c;
}

void print_report(const tsvf::cli::RunReport& report, const tsvf::cli::RunConfig& c) {
  for (const auto& f : report.files_written) {
    std::cout << (c.output_dir / f.path).string() << " (" << f.rows << " rows)\n";
  }
  std::cout << (c.output_dir / "manifest.json").string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward, backward and enlarged-space open-system simulations with weak-value analysis"};
  app.require_subcommand(1);

  RunOptions simulate_opts, sweep_opts, voltage_opts, jumps_opts;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the configured modes once");
  add_run_options(simulate, simulate_opts);

  CLI::App* sweep = app.add_subcommand("sweep", "Run the configured modes over an omega or k sweep");
  add_run_options(sweep, sweep_opts);

  CLI::App* voltage = app.add_subcommand("voltage", "Voltage-signal means and weak values");
  add_run_options(voltage, voltage_opts);
  double strength_a = 1.0;
  bool exact_correction = false;
  voltage->add_option("--a", strength_a, "Measurement strength a")->required();
  voltage->add_flag("--exact-correction", exact_correction, "Weight cross terms by exp(-1/2a^2)");

  CLI::App* jumps = app.add_subcommand("jumps", "Detect jumps in the two-time weak value");
  add_run_options(jumps, jumps_opts);
  double threshold = 0.5;
  jumps->add_option("--threshold", threshold, "Plateau threshold in (0, 1)")->required();

  CLI::App* validate = app.add_subcommand("validate", "Check a configuration file without running it");
  std::string validate_path;
  validate->add_option("path", validate_path, "TOML configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (validate->parsed()) {
      auto diagnostics = tsvf::cli::validate_file(validate_path);
      if (diagnostics.empty()) {
        const auto c = tsvf::cli::load_config(validate_path);
        if (c.sweep) diagnostics = tsvf::cli::check_runnable(c, tsvf::cli::RunKind::sweep);
      }
      for (const auto& d : diagnostics) std::cout << d.str() << '\n';
      if (diagnostics.empty()) std::cout << "ok\n";
      return diagnostics.empty() ? 0 : kConfigError;
    }

    CLI::App* cmd = simulate->parsed() ? simulate : sweep->parsed() ? sweep : voltage->parsed() ? voltage : jumps;
    const RunOptions& opts = simulate->parsed() ? simulate_opts
                             : sweep->parsed()  ? sweep_opts
                             : voltage->parsed() ? voltage_opts
                                                 : jumps_opts;
    std::vector<Override> overrides = collect(cmd, opts);
    if (cmd == voltage) {
      overrides.push_back({"modes", "[\"voltage\"]"});
      overrides.push_back({"measurement.a", tsvf::cli::format_number(strength_a)});
      if (exact_correction) overrides.push_back({"measurement.exact_correction", "true"});
    } else if (cmd == jumps) {
      overrides.push_back({"modes", "[\"jumps\"]"});
      overrides.push_back({"measurement.jump_threshold", tsvf::cli::format_number(threshold)});
    }
    const tsvf::cli::RunConfig config = load(opts, overrides);
    const auto kind = cmd == sweep ? tsvf::cli::RunKind::sweep : tsvf::cli::RunKind::simulate;
    print_report(tsvf::cli::run(config, kind), config);
    return 0;
  } catch (const tsvf::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const tsvf::IntegrationDiverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
