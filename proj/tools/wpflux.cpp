// wpflux: experiment runner for the wave-packet flux library.
//
//   wpflux figure1 [--config FILE] [--d-list 0,0.01] [--routes averaged,mc] ...
//   wpflux validate --set drift_coefficient=10
//
// Exit status: 0 success, 1 usage error, 2 validation failure, 3 numerical error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "wpflux/config.hpp"
#include "wpflux/errors.hpp"
#include "wpflux/experiments.hpp"
#include "wpflux/validation.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::map<std::string, std::string> overrides;  // config key -> text
  std::vector<std::string> sets;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "key = value config file (a run manifest works)");
  auto flag = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, help);
  };
  flag("--x-obs", "x_obs", "observation point");
  flag("--sigma", "sigma", "initial packet width");
  flag("--d-list", "d_list", "comma-separated noise intensities");
  flag("--n-paths", "n_paths", "Monte Carlo paths / classical trajectories");
  flag("--seed", "seed", "base seed");
  flag("--routes", "routes", "comma-separated: analytic, averaged, mc, tdse, classical");
  flag("--out-dir", "out_dir", "output directory");
  flag("--format", "format", "csv, svg or both");
  cmd->add_option("--set", flags.sets, "any config key as key=value (repeatable)");
  cmd->add_flag("-q,--quiet", flags.quiet, "suppress the run summary");
}

wpflux::ExperimentConfig build_config(const std::string& command, const CommonFlags& flags) {
  auto config = wpflux::ExperimentConfig::defaults_for(command);
  if (!flags.config.empty()) config.merge_file(flags.config);
  for (const auto& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw wpflux::UsageError("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : flags.overrides) config.set(key, value);
  config.validate();
  return config;
}

void print_report(const wpflux::RunReport& report, bool quiet) {
  if (quiet) return;
  std::cout << report.summary;
  for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
}

int run_validate(const wpflux::ExperimentConfig& config, bool quiet) {
  const auto options = wpflux::ValidationOptions::from_config(config);
  std::vector<wpflux::CheckResult> results;
  // Run check by check so progress shows up as it happens.
  auto show = [&](const wpflux::CheckResult& c) {
    results.push_back(c);
    if (!quiet) std::cout << wpflux::format_line(c) << std::endl;
  };
  show(wpflux::check_d0_reduction(options));
  for (const auto& c : wpflux::check_tdse_oracle(options)) show(c);
  for (const auto& c : wpflux::check_averaged_vs_mc(options)) show(c);
  show(wpflux::check_noise_covariance(options));
  show(wpflux::check_figure1(options));
  show(wpflux::check_figure2(options));
  show(wpflux::check_furutsu_novikov(options));
  show(wpflux::check_continuity(options));
  show(wpflux::check_zero_flux_locus(options));
  show(wpflux::check_plane_wave(options));

  std::filesystem::create_directories(config.out_dir);
  const auto path = config.out_dir / "validate_report.tsv";
  std::ofstream out(path);
  if (!out) throw wpflux::IoError("cannot write " + path.string());
  out << wpflux::format_report(results);
  wpflux::write_manifest(config, "validate");

  const bool ok = wpflux::all_passed(results);
  for (const auto& c : results) {
    if (!c.informational && !c.passed) {
      std::cerr << "validation failed: [" << c.criterion << "] " << c.name << '\n';
    }
  }
  if (!quiet) std::cout << (ok ? "all checks passed" : "validation FAILED") << '\n';
  return ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probability flux of a Gaussian wave packet under a field plus white noise"};
  app.set_version_flag("--version", WPFLUX_VERSION);
  app.require_subcommand(1);

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"figure1", "constant-field flux for a sweep of noise intensities"},
      {"figure2", "femtosecond-pulse flux for a sweep of noise intensities"},
      {"flux", "flux at one point from the configured routes"},
      {"validate", "run every cross-route acceptance check"},
      {"covariance", "empirical noise-path moments against theory"},
      {"classical", "classical ensemble moments and energy pumping"},
  };
  std::map<std::string, CommonFlags> flags;
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags[name]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const CommonFlags& f = flags[command];
  try {
    const auto config = build_config(command, f);
    if (command == "validate") return run_validate(config, f.quiet);
    wpflux::RunReport report;
    if (command == "figure1") report = wpflux::run_figure1(config);
    if (command == "figure2") report = wpflux::run_figure2(config);
    if (command == "flux") report = wpflux::run_flux(config);
    if (command == "covariance") report = wpflux::run_covariance(config);
    if (command == "classical") report = wpflux::run_classical(config);
    print_report(report, f.quiet);
    return 0;
  } catch (const wpflux::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const wpflux::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
