#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wpflux/analytic.hpp"
#include "wpflux/fields.hpp"

namespace wpflux {

/// Periodic grid x_j = x_min + j dx, dx = (x_max - x_min) / n, for the
/// split-operator solver of i psi_t = -psi_xx / 2 - E(t) x psi.
struct GridSpec {
  double x_min = -400.0;
  double x_max = 600.0;
  std::size_t n = 16384;  // power of two, >= 256
  double dt = 5e-3;       // largest time step

  void validate() const;
  double length() const { return x_max - x_min; }
  double dx() const { return length() / static_cast<double>(n); }
  double x(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }
  /// Angular wavenumber of FFT bin j (standard ordering, Nyquist negative).
  double k(std::size_t j) const;
};

struct WaveState {
  GridSpec grid;
  std::vector<std::complex<double>> values;
  double t = 0.0;

  /// Discrete norm sum |psi|^2 dx.
  double norm() const;
};

using FieldFn = std::function<double(double)>;

/// Normalized Gaussian (sigma sqrt(pi))^(-1/2) exp(-x^2 / 2 sigma^2) at t = 0.
/// Throws ConfigurationError unless x_min <= -8 sigma and x_max >= 8 sigma.
WaveState init_gaussian(const GridSpec& grid, const PacketSpec& packet);

struct Observables {
  double norm = 0.0;
  double mean_x = 0.0;
  double mean_k = 0.0;
  double kinetic = 0.0;  // <k^2> / 2
};

/// Strang-split propagator with a per-instance FFT workspace:
///   exp(+i E(t+dt/2) x dt/2) . exp(-i k^2 dt/2) . exp(+i E(t+dt/2) x dt/2)
/// The field is sampled at the step midpoint. Not shareable across threads;
/// use one Propagator per run.
class Propagator {
 public:
  explicit Propagator(const GridSpec& grid);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  const GridSpec& grid() const;

  /// One full Strang step of length dt.
  void step(WaveState& state, const FieldFn& field, double dt);

  /// Advances to t_target with equal steps no longer than grid.dt; adjacent
  /// potential half-steps are fused. Checks boundary leakage on exit.
  void evolve_to(WaveState& state, const FieldFn& field, double t_target);

  /// j = Im(conj(psi) psi_x) with psi_x from spectral differentiation,
  /// cubic-interpolated at x_obs. RangeError if x_obs is off the grid.
  double flux_at(const WaveState& state, double x_obs);

  /// j at every grid point.
  std::vector<double> flux_field(const WaveState& state);

  Observables observables(const WaveState& state);

  /// Largest |psi| within the outer 2% of the domain on either side.
  double boundary_amplitude(const WaveState& state) const;

  /// Leakage above this amplitude raises NumericalError in evolve_to
  /// (non-positive disables the check).
  void set_boundary_tolerance(double tol);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct TdseOptions {
  GridSpec base_grid;
  /// Widen (and refine) the base grid so the packet stays >= margin away
  /// from both ends for the whole run.
  bool auto_domain = true;
  double margin = 50.0;
  double widths = 10.0;
  double boundary_tolerance = 1e-12;
};

struct TdseRun {
  FluxSeries flux;
  GridSpec grid;  // grid actually used
  std::vector<Observables> observables;  // one per output time
};

/// Smallest grid that keeps the base resolution and contains the packet,
/// given samples of the field integrals f(t), Phi(t) along the run. The
/// packet occupies Phi +- widths * sqrt(sigma^2 + t^2/sigma^2) in x and
/// f +- widths / sigma in k.
GridSpec plan_grid(const GridSpec& base, const PacketSpec& packet, std::span<const double> times,
                   std::span<const double> f_track, std::span<const double> phi_track,
                   double margin = 50.0, double widths = 10.0);

/// Flux at x_obs over the output times from a direct TDSE integration.
TdseRun tdse_flux_series(double x_obs, std::span<const double> times, const PacketSpec& packet,
                         const FieldModel& field, const TdseOptions& options = {});

/// Same for an arbitrary field supplier; f_track / phi_track sample its
/// integrals at `times` for domain planning.
TdseRun tdse_flux_series(double x_obs, std::span<const double> times, const PacketSpec& packet,
                         const FieldFn& field, std::span<const double> f_track,
                         std::span<const double> phi_track, const TdseOptions& options = {});

struct Snapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> density;
  std::vector<double> flux;
};

Snapshot take_snapshot(Propagator& propagator, const WaveState& state);

/// Exact free-particle Gaussian at time t (zero field), for validation.
std::complex<double> free_gaussian(double x, double t, double sigma);

}  // namespace wpflux
