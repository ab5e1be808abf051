#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wpflux/fields.hpp"

namespace wpflux {

/// Initial packet psi(x, 0) = (sigma sqrt(pi))^(-1/2) exp(-x^2 / 2 sigma^2).
/// k0 is only used by the plane-wave operations.
struct PacketSpec {
  double sigma = 1.0;
  double k0 = 0.0;

  void validate() const;
};

/// Flux samples at a fixed observation point. std_error is empty for the
/// closed-form routes and filled by Monte Carlo estimators.
struct FluxSeries {
  double x_obs = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> std_error;

  void validate() const;
  bool has_std_error() const { return !std_error.empty(); }
};

/// Noise drift term G(t) = coefficient * D * t^2 in the averaged flux
/// bracket. The Monte Carlo ensemble selects coefficient = 2.
struct DriftModel {
  double coefficient = 2.0;

  double operator()(double D, double t) const { return coefficient * D * t * t; }
};

/// phi0(k) = sqrt(2 sigma sqrt(pi)) exp(-sigma^2 k^2 / 2), normalized so that
/// int dk/2pi |phi0|^2 = 1.
double initial_momentum_amplitude(double k, double sigma);

/// Momentum-space solution along the characteristics dk/dt = E(t):
///   psi(k, t) = phi0(k - f(t)) exp(-(i/2) int_0^t (k + f(t') - f(t))^2 dt').
/// The phase integral is computed by step-halving Simpson (rel tol 1e-10).
std::complex<double> psi_momentum(double k, double t, const PacketSpec& packet,
                                  const FieldModel& field);

/// Flux of an initial plane wave exp(i k0 x): j = k0 + f(t).
double plane_wave_flux(double k0, double t, const FieldModel& field);

/// Packet width parameter w^2 = sigma^2 + t^2 / sigma^2 of the density
/// rho ~ exp(-(x - Phi)^2 / w^2).
double spread_width_squared(double t, double sigma);

double gaussian_density(double x, double t, const PacketSpec& packet, const FieldModel& field);
double gaussian_flux(double x, double t, const PacketSpec& packet, const FieldModel& field);

/// Root in x of the velocity bracket of gaussian_flux:
///   x0(t) = Phi(t) - f(t) (sigma^4 + t^2) / t.
/// Throws DomainError for t <= 0.
double zero_flux_point(double t, const PacketSpec& packet, const FieldModel& field);

/// Noise-averaged flux for white noise of intensity D (<eta eta'> = 2D delta):
///   <j> = (pi S)^(-1/2) exp(-(x - Phi0)^2 / S) [f0 + (x - Phi0)/S (t/sigma^2 + G(t))]
/// with S = sigma^2 + 4 D t^3 / 3 + t^2 / sigma^2 and G(t) = 2 D t^2.
double averaged_flux(double x, double t, const PacketSpec& packet, const FieldModel& field,
                     double D, const DriftModel& drift = {});

/// Noise-averaged density; its center stays at Phi0(t) for every D.
double averaged_density(double x, double t, const PacketSpec& packet, const FieldModel& field,
                        double D);

FluxSeries gaussian_flux_series(double x, std::span<const double> times, const PacketSpec& packet,
                                const FieldModel& field);
FluxSeries averaged_flux_series(double x, std::span<const double> times, const PacketSpec& packet,
                                const FieldModel& field, double D, const DriftModel& drift = {});

/// Flux of the Gaussian packet given the field integrals f and Phi at time t
/// directly; gaussian_flux and the per-realization stochastic flux share it.
double flux_from_integrals(double x, double t, double sigma, double f, double phi);

/// n points evenly spaced on [t0, t1] inclusive (n >= 2).
std::vector<double> uniform_grid(double t0, double t1, std::size_t n);

}  // namespace wpflux
