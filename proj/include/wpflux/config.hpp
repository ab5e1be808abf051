#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wpflux/analytic.hpp"
#include "wpflux/fields.hpp"
#include "wpflux/stochastic.hpp"
#include "wpflux/tdse.hpp"

namespace wpflux {

enum class Route { Analytic, Averaged, MonteCarlo, Tdse, Classical };
enum class OutputFormat { Csv, Svg, Both };

std::string to_string(Route route);
Route parse_route(const std::string& name);
std::string to_string(OutputFormat format);
OutputFormat parse_format(const std::string& name);

/// Everything a run needs. Read from a flat "key = value" file ('#' starts a
/// comment); command-line flags are applied on top with set().
///
/// Keys:
///   field               zero | constant | femto | tabulated
///   field.E             constant field strength
///   pulse.amplitude     femtosecond pulse amplitude
///   pulse.omega         femtosecond pulse angular frequency
///   field.file          two-column (t, E) file for tabulated
///   sigma, k0           packet width and plane-wave momentum
///   x_obs               observation point
///   t_max, t_samples    output grid [0, t_max] with t_samples points
///   d_list              comma-separated noise intensities for sweeps
///   D                   noise intensity for covariance / classical pumping
///   n_paths, seed       ensemble size and base seed
///   noise.dt            path time step
///   noise.scheme        trapezoid | exact
///   covariance.times    comma-separated sample times
///   drift_coefficient   coefficient c in G(t) = c D t^2
///   routes              comma-separated subset of analytic, averaged, mc, tdse, classical
///   out_dir, format     output directory and csv | svg | both
///   tdse.x_min, tdse.x_max, tdse.n, tdse.dt, tdse.auto_domain
///   classical.stride    integrator steps between recorded samples
///   validate.tdse       include the spectral-solver checks (true | false)
///   workers             worker threads (0 = all cores)
struct ExperimentConfig {
  std::string field_kind = "constant";
  double field_E = 0.3;
  double pulse_amplitude = 0.1;
  double pulse_omega = 0.114;
  std::string field_file;

  PacketSpec packet;
  double x_obs = 20.0;
  double t_max = 100.0;
  std::size_t t_samples = 400;

  std::vector<double> d_list{0.0, 0.005, 0.01, 0.02};
  double noise_D = 0.05;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 42;
  double noise_dt = 0.05;
  PathScheme noise_scheme = PathScheme::Trapezoid;
  std::vector<double> covariance_times{1.0, 3.0, 4.0, 6.0, 7.0};
  double drift_coefficient = 2.0;

  std::vector<Route> routes{Route::Averaged};
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::Both;

  GridSpec tdse_grid;
  bool tdse_auto_domain = true;
  std::size_t classical_stride = 10;
  bool validate_tdse = true;
  unsigned workers = 0;

  /// Defaults tuned per subcommand (figure2 switches to the pulse, flux to
  /// the closed form at D = 0, ...).
  static ExperimentConfig defaults_for(const std::string& command);

  /// Sets one key from its text form; UsageError names the key on failure.
  void set(const std::string& key, const std::string& value);
  /// Parses "key = value" lines; unknown keys are usage errors.
  void merge_text(const std::string& text, const std::string& origin = "config");
  void merge_file(const std::filesystem::path& path);

  /// Key/value echo of every setting; merge_text(to_text()) is lossless.
  std::string to_text() const;

  void validate() const;

  FieldModel make_field() const;
  NoiseSpec noise(double D) const;
  std::vector<double> time_grid() const;
  bool has_route(Route route) const;
};

/// Comma-separated doubles ("0, 0.01,0.02").
std::vector<double> parse_double_list(const std::string& text, const std::string& key);

}  // namespace wpflux
