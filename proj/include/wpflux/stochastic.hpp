#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wpflux/analytic.hpp"
#include "wpflux/ensemble.hpp"
#include "wpflux/fields.hpp"

namespace wpflux {

/// How Phi~ is built from the sampled Brownian path f~.
enum class PathScheme {
  /// f~ increments ~ Normal(0, 2D dt); Phi~ is the trapezoidal running
  /// integral of f~.
  Trapezoid,
  /// Exact joint increments of (f~, Phi~) over each step:
  /// Var df = 2D dt, Var dPhi|f = 2D dt^3/3, Cov = D dt^2.
  ExactJoint,
};

/// Gaussian white noise eta with <eta(t) eta(t')> = 2 D delta(t - t').
/// Only its integrals f~ = int eta and Phi~ = int f~ are ever sampled.
struct NoiseSpec {
  double D = 0.0;
  double dt = 0.05;
  std::uint64_t seed = 42;
  PathScheme scheme = PathScheme::Trapezoid;

  void validate() const;
};

/// One realization of (f~, Phi~) on t_i = i dt, i = 0..n.
struct NoisePath {
  double dt = 0.0;
  PathScheme scheme = PathScheme::Trapezoid;
  std::vector<double> times;
  std::vector<double> f_tilde;
  std::vector<double> phi_tilde;

  double t_max() const { return times.back(); }

  /// f~ interpolated linearly between nodes (the path of a piecewise-constant
  /// noise eta_hat); RangeError outside [0, t_max].
  double f_at(double t) const;
  /// Phi~ consistent with f_at: the exact integral of the linear interpolant.
  double phi_at(double t) const;
  /// Piecewise-constant noise (f~_{i+1} - f~_i) / dt on [t_i, t_{i+1}).
  double eta_hat(double t) const;
};

/// Path `index` of the ensemble defined by spec.seed. Identical
/// (spec, t_max, index) gives a bit-identical path.
NoisePath sample_path(const NoiseSpec& spec, double t_max, std::uint64_t index = 0);

/// Keeps every factor-th node of f~ and re-integrates Phi~ on the coarse grid.
NoisePath coarsen_path(const NoisePath& path, std::size_t factor);

/// Flux of the Gaussian packet for one noise realization: f -> f0 + f~,
/// Phi -> Phi0 + Phi~ substituted into the deterministic closed form.
FluxSeries realization_flux(double x, std::span<const double> times, const PacketSpec& packet,
                            const FieldModel& field, const NoisePath& path);

/// Monte Carlo estimate of the noise-averaged flux over n_paths realizations
/// (paths 0..n_paths-1 of spec.seed), with per-sample standard errors.
FluxSeries ensemble_flux(double x, std::span<const double> times, const PacketSpec& packet,
                         const FieldModel& field, const NoiseSpec& spec, std::size_t n_paths,
                         const ParallelOptions& parallel = {});

/// Same estimator for an arbitrary path source; path_for(i) must be pure.
FluxSeries ensemble_flux_from(double x, std::span<const double> times, const PacketSpec& packet,
                              const FieldModel& field, std::size_t n_paths,
                              const std::function<NoisePath(std::size_t)>& path_for,
                              const ParallelOptions& parallel = {});

struct MomentEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

struct CovariancePair {
  double t1 = 0.0;
  double t2 = 0.0;
  MomentEstimate ff;      // <f~(t1) f~(t2)>
  double theory = 0.0;    // 2 D min(t1, t2)
};

struct CovariancePoint {
  double t = 0.0;
  MomentEstimate phi2;            // <Phi~(t)^2>
  double phi2_theory = 0.0;       // 2 D t^3 / 3
  MomentEstimate phi_f;           // <Phi~(t) f~(t)>
  double phi_f_theory_dt2 = 0.0;  // D t^2
  double phi_f_theory_2dt2 = 0.0; // 2 D t^2
};

struct CovarianceReport {
  NoiseSpec spec;
  std::size_t n_paths = 0;
  std::vector<CovariancePair> pairs;  // full |times| x |times| grid
  std::vector<CovariancePoint> points;
};

/// Empirical second moments of the sampled paths next to their theory values.
/// Requires n_paths >= 100.
CovarianceReport covariance_report(const NoiseSpec& spec, std::span<const double> times,
                                   std::size_t n_paths, const ParallelOptions& parallel = {});

struct VarianceGrowth {
  std::vector<double> times;
  std::vector<double> var_f;    // sample Var[f~(t)]
  std::vector<double> var_phi;  // sample Var[Phi~(t)]
  MomentEstimate brownian_slope;  // d Var[f~]/dt, expected 2D
  double phi_exponent = 0.0;      // log-log slope of Var[Phi~], expected 3
};

/// Growth of the path variances over the given times: a least-squares slope
/// of Var[f~] (with a path-to-path standard error) and the log-log exponent
/// of Var[Phi~].
VarianceGrowth variance_growth(const NoiseSpec& spec, std::span<const double> times,
                               std::size_t n_paths, const ParallelOptions& parallel = {});

}  // namespace wpflux
