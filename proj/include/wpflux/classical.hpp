#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wpflux/analytic.hpp"
#include "wpflux/ensemble.hpp"
#include "wpflux/fields.hpp"
#include "wpflux/stochastic.hpp"
#include "wpflux/tdse.hpp"

namespace wpflux {

/// Classical electron driven by the same field in dimensionless units,
///   dy = E(t) dt + dW,  dW ~ Normal(0, 2 D dt),   dx = y dt,
/// with the force sign of the quantum Hamiltonian (+E). Samples are kept on
/// a recording grid (every record_stride integrator steps); x and y are
/// row-major [trajectory][time].
struct ClassicalEnsemble {
  std::size_t n = 0;
  NoiseSpec spec;
  std::vector<double> times;
  std::vector<double> x;
  std::vector<double> y;

  double x_at(std::size_t traj, std::size_t k) const { return x[traj * times.size() + k]; }
  double y_at(std::size_t traj, std::size_t k) const { return y[traj * times.size() + k]; }
};

struct ClassicalOptions {
  std::size_t record_stride = 10;
  ParallelOptions parallel;
};

/// Euler-Maruyama for the velocity with the deterministic drift integrated
/// exactly over each step (f(t+dt) - f(t)); trapezoidal rule for the
/// position. Trajectory i draws its noise from stream (spec.seed, i), the
/// same stream sample_path uses for path i.
ClassicalEnsemble simulate(const FieldModel& field, const NoiseSpec& spec, double t_max,
                           std::size_t n, const ClassicalOptions& options = {});

struct ClassicalMoments {
  std::vector<double> times;
  std::vector<double> mean_x, se_x;
  std::vector<double> mean_y, se_y;
  std::vector<double> mean_energy, se_energy;  // <y^2 / 2>
  std::vector<double> var_y;
};

ClassicalMoments moment_series(const ClassicalEnsemble& ensemble);

struct EnergyRateRow {
  double t_mid = 0.0;
  double empirical = 0.0;  // mean of (y_b^2 - y_a^2) / (2 (t_b - t_a))
  double std_error = 0.0;
  double theory = 0.0;     // Ebar <y>_mid + D
  double deviation_se = 0.0;
};

struct EnergyRateReport {
  std::vector<EnergyRateRow> rows;
  double max_deviation_se = 0.0;
  double max_abs_deviation = 0.0;
};

/// Kinetic-energy rate between consecutive recording times against
/// d<y^2/2>/dt = E <y> + D. Ebar is the interval mean of E, <y>_mid the
/// mean of the ensemble velocity at both ends. Requires n >= 100.
EnergyRateReport energy_rate_report(const ClassicalEnsemble& ensemble, const FieldModel& field);

/// Least-squares slope of Var[y]/2 over recording times in [t_lo, t_hi]: the
/// noise pumping rate on top of the field work, expected to equal D.
MomentEstimate pumping_rate_fit(const ClassicalEnsemble& ensemble, double t_lo, double t_hi);

struct CrosscheckRow {
  double t = 0.0;
  double classical_x = 0.0;
  double classical_se = 0.0;
  double quantum_center = 0.0;  // first moment of the noise-averaged density
  double tdse_center = 0.0;     // NaN when no grid was given
  bool agree = false;
};

struct CrosscheckReport {
  std::vector<CrosscheckRow> rows;
  bool all_agree = true;
};

/// Classical mean position against the center of the noise-averaged quantum
/// density (and the TDSE <x> of the noiseless run when grid is given).
/// Agreement: within 3 standard errors of the classical ensemble, plus twice
/// the integrator bias of the noiseless trajectory and a 1e-9 relative floor.
CrosscheckReport quantum_classical_crosscheck(const FieldModel& field, const NoiseSpec& spec,
                                              const PacketSpec& packet,
                                              const std::optional<GridSpec>& grid,
                                              std::span<const double> t_probe, std::size_t n,
                                              const ClassicalOptions& options = {});

}  // namespace wpflux
