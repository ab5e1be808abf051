#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpflux/config.hpp"
#include "wpflux/ensemble.hpp"
#include "wpflux/tdse.hpp"

namespace wpflux {

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values and thresholds
  bool informational = false;  // reported, never gating
};

struct ValidationOptions {
  double sigma = 1.0;
  double x_obs = 20.0;
  double t_max = 100.0;
  std::size_t t_samples = 400;
  std::vector<double> d_sweep{0.0, 0.005, 0.01, 0.02};
  double noise_D = 0.05;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 42;
  double noise_dt = 0.05;
  double drift_coefficient = 2.0;
  std::vector<double> covariance_times{1.0, 3.0, 4.0, 6.0, 7.0};
  bool run_tdse = true;
  /// Also run the solver on the base grid without domain widening and print
  /// the result as a non-gating line.
  bool tdse_literal_grid_info = true;
  GridSpec tdse_grid;
  ParallelOptions parallel;

  static ValidationOptions from_config(const ExperimentConfig& config);
};

CheckResult check_d0_reduction(const ValidationOptions& options);
std::vector<CheckResult> check_tdse_oracle(const ValidationOptions& options);
/// Literal band test over every output time, then the same test restricted to
/// times whose mean the ensemble can resolve.
std::vector<CheckResult> check_averaged_vs_mc(const ValidationOptions& options);
CheckResult check_noise_covariance(const ValidationOptions& options);
CheckResult check_figure1(const ValidationOptions& options);
CheckResult check_figure2(const ValidationOptions& options);
CheckResult check_furutsu_novikov(const ValidationOptions& options);
CheckResult check_continuity(const ValidationOptions& options);
CheckResult check_zero_flux_locus(const ValidationOptions& options);
CheckResult check_plane_wave(const ValidationOptions& options);

/// Every check in criterion order.
std::vector<CheckResult> run_validation(const ValidationOptions& options);

/// "PASS [3] name: detail" per check.
std::string format_line(const CheckResult& result);
/// Tab-separated criterion, name, status, detail, one row per check.
std::string format_report(const std::vector<CheckResult>& results);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace wpflux
