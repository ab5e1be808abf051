#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpflux/config.hpp"
#include "wpflux/output.hpp"

namespace wpflux {

/// Flux columns "route:D=<d>" for every (route, D) pair of the config, in
/// route order then D order. The analytic and tdse routes carry no noise, so
/// their column repeats the same curve for each D. Monte Carlo standard
/// errors go to a parallel collection holding only the mc columns.
struct FluxTable {
  SeriesCollection data;
  std::optional<SeriesCollection> std_error;
  std::optional<GridSpec> tdse_grid;
};

FluxTable flux_table(const ExperimentConfig& config, bool with_field_column);

std::string column_name(Route route, double D);

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

/// Each runner writes <out_dir>/<command>.{csv,svg} (per config.format) plus
/// <command>.manifest.txt. Feeding the manifest back through --config
/// reproduces the outputs bit for bit.
RunReport run_figure1(const ExperimentConfig& config);
RunReport run_figure2(const ExperimentConfig& config);
RunReport run_flux(const ExperimentConfig& config);
RunReport run_covariance(const ExperimentConfig& config);
RunReport run_classical(const ExperimentConfig& config);

std::filesystem::path write_manifest(const ExperimentConfig& config, const std::string& command);

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

double peak_abs(std::span<const double> values);

/// Total time during which |j| exceeds half of its peak, with the crossings
/// located by linear interpolation between samples.
double half_max_width(std::span<const double> times, std::span<const double> values);

/// Maximal intervals where |a| > |b|, with interpolated end points. Samples
/// where both magnitudes are below `floor` are treated as ties.
std::vector<TimeWindow> windows_where_greater(std::span<const double> times,
                                              std::span<const double> a,
                                              std::span<const double> b, double floor = 0.0);

}  // namespace wpflux
