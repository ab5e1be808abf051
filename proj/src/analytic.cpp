#include "wpflux/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wpflux/errors.hpp"
#include "wpflux/quadrature.hpp"

namespace wpflux {

namespace {

void require_time(double t, const char* what) {
  if (!(t >= 0.0)) {
    std::ostringstream msg;
    msg << what << " requires t >= 0 (got " << t << ")";
    throw DomainError(msg.str());
  }
}

void require_intensity(double D) {
  if (!(D >= 0.0)) throw DomainError("noise intensity D must be >= 0");
}

}  // namespace

void PacketSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("packet width sigma must be > 0");
  if (!std::isfinite(k0)) throw UsageError("carrier momentum k0 must be finite");
}

void FluxSeries::validate() const {
  if (times.size() != values.size()) throw UsageError("flux series: times/values length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw UsageError("flux series: times not strictly increasing");
  }
  if (!std_error.empty()) {
    if (std_error.size() != values.size()) {
      throw UsageError("flux series: std_error length mismatch");
    }
    for (double s : std_error) {
      if (!(s >= 0.0)) throw UsageError("flux series: negative standard error");
    }
  }
}

double initial_momentum_amplitude(double k, double sigma) {
  return std::sqrt(2.0 * sigma * std::sqrt(std::numbers::pi)) * std::exp(-0.5 * sigma * sigma * k * k);
}

std::complex<double> psi_momentum(double k, double t, const PacketSpec& packet,
                                  const FieldModel& field) {
  packet.validate();
  require_time(t, "psi_momentum");
  const double f_t = field.momentum_gain(t);
  const double amplitude = initial_momentum_amplitude(k - f_t, packet.sigma);
  if (t == 0.0) return {amplitude, 0.0};
  const auto phase_integral = simpson_to_tolerance(
      [&](double s) {
        const double p = k + field.momentum_gain(s) - f_t;
        return p * p;
      },
      0.0, t);
  return std::polar(amplitude, -0.5 * phase_integral.value);
}

double plane_wave_flux(double k0, double t, const FieldModel& field) {
  return k0 + field.momentum_gain(t);
}

double spread_width_squared(double t, double sigma) {
  return sigma * sigma + t * t / (sigma * sigma);
}

double gaussian_density(double x, double t, const PacketSpec& packet, const FieldModel& field) {
  packet.validate();
  require_time(t, "gaussian_density");
  const double w2 = spread_width_squared(t, packet.sigma);
  const double u = x - field.displacement(t);
  return std::exp(-u * u / w2) / std::sqrt(std::numbers::pi * w2);
}

double flux_from_integrals(double x, double t, double sigma, double f, double phi) {
  if (t == 0.0) return 0.0;
  const double sigma2 = sigma * sigma;
  const double w2 = sigma2 + t * t / sigma2;
  const double u = x - phi;
  const double rho = std::exp(-u * u / w2) / std::sqrt(std::numbers::pi * w2);
  return rho * (f + u / w2 * (t / sigma2));
}

double gaussian_flux(double x, double t, const PacketSpec& packet, const FieldModel& field) {
  packet.validate();
  require_time(t, "gaussian_flux");
  if (t == 0.0) return 0.0;
  return flux_from_integrals(x, t, packet.sigma, field.momentum_gain(t), field.displacement(t));
}

double zero_flux_point(double t, const PacketSpec& packet, const FieldModel& field) {
  packet.validate();
  if (!(t > 0.0)) throw DomainError("zero_flux_point is undefined at t <= 0");
  const double f = field.momentum_gain(t);
  if (!std::isfinite(f)) throw NumericalError("zero_flux_point: non-finite momentum gain");
  const double sigma2 = packet.sigma * packet.sigma;
  return field.displacement(t) - f * (sigma2 * sigma2 + t * t) / t;
}

double averaged_flux(double x, double t, const PacketSpec& packet, const FieldModel& field,
                     double D, const DriftModel& drift) {
  packet.validate();
  require_time(t, "averaged_flux");
  require_intensity(D);
  if (t == 0.0) return 0.0;
  const double sigma2 = packet.sigma * packet.sigma;
  const double s2 = sigma2 + 4.0 * D * t * t * t / 3.0;
  const double S = s2 + t * t / sigma2;
  const double u = x - field.displacement(t);
  const double f0 = field.momentum_gain(t);
  const double envelope = std::exp(-u * u / S) / std::sqrt(std::numbers::pi * S);
  return envelope * (f0 + u / S * (t / sigma2 + drift(D, t)));
}

double averaged_density(double x, double t, const PacketSpec& packet, const FieldModel& field,
                        double D) {
  packet.validate();
  require_time(t, "averaged_density");
  require_intensity(D);
  const double sigma2 = packet.sigma * packet.sigma;
  const double S = sigma2 + 4.0 * D * t * t * t / 3.0 + t * t / sigma2;
  const double u = x - field.displacement(t);
  return std::exp(-u * u / S) / std::sqrt(std::numbers::pi * S);
}

FluxSeries gaussian_flux_series(double x, std::span<const double> times, const PacketSpec& packet,
                                const FieldModel& field) {
  FluxSeries out{x, {times.begin(), times.end()}, {}, {}};
  out.values.reserve(times.size());
  for (double t : times) out.values.push_back(gaussian_flux(x, t, packet, field));
  out.validate();
  return out;
}

FluxSeries averaged_flux_series(double x, std::span<const double> times, const PacketSpec& packet,
                                const FieldModel& field, double D, const DriftModel& drift) {
  FluxSeries out{x, {times.begin(), times.end()}, {}, {}};
  out.values.reserve(times.size());
  for (double t : times) out.values.push_back(averaged_flux(x, t, packet, field, D, drift));
  out.validate();
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
  if (n < 2) throw UsageError("a time grid needs at least two samples");
  if (!(t1 > t0)) throw UsageError("time grid end must exceed its start");
  std::vector<double> grid(n);
  const double step = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = t0 + step * static_cast<double>(i);
  grid.back() = t1;
  return grid;
}

}  // namespace wpflux
