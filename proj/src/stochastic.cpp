#include "wpflux/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "wpflux/errors.hpp"

namespace wpflux {

void NoiseSpec::validate() const {
  if (!(D >= 0.0) || !std::isfinite(D)) throw UsageError("noise intensity D must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("noise time step dt must be > 0");
}

namespace {

std::size_t segment_for(const NoisePath& path, double t) {
  const double slack = 1e-12 * std::max(1.0, path.t_max());
  if (!(t >= -slack) || t > path.t_max() + slack) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t = " << t << " lies outside the noise path range [0, " << path.t_max() << "]";
    throw RangeError(msg.str());
  }
  const auto last = path.times.size() - 2;
  if (t <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(t / path.dt), last);
}

}  // namespace

double NoisePath::f_at(double t) const {
  const std::size_t i = segment_for(*this, t);
  const double tau = t - times[i];
  return f_tilde[i] + (f_tilde[i + 1] - f_tilde[i]) * (tau / dt);
}

double NoisePath::phi_at(double t) const {
  const std::size_t i = segment_for(*this, t);
  const double tau = t - times[i];
  const double df = f_tilde[i + 1] - f_tilde[i];
  double phi = phi_tilde[i] + f_tilde[i] * tau + df * tau * tau / (2.0 * dt);
  if (scheme == PathScheme::ExactJoint) {
    // Spread the node mismatch against the trapezoid linearly over the step.
    const double excess = phi_tilde[i + 1] - phi_tilde[i] - 0.5 * dt * (f_tilde[i] + f_tilde[i + 1]);
    phi += excess * (tau / dt);
  }
  return phi;
}

double NoisePath::eta_hat(double t) const {
  const std::size_t i = segment_for(*this, t);
  return (f_tilde[i + 1] - f_tilde[i]) / dt;
}

NoisePath sample_path(const NoiseSpec& spec, double t_max, std::uint64_t index) {
  spec.validate();
  if (!(t_max > 0.0)) throw UsageError("sample_path requires t_max > 0");
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_max / spec.dt - 1e-9)));

  NoisePath path;
  path.dt = spec.dt;
  path.scheme = spec.scheme;
  path.times.resize(steps + 1);
  path.f_tilde.assign(steps + 1, 0.0);
  path.phi_tilde.assign(steps + 1, 0.0);
  for (std::size_t i = 0; i <= steps; ++i) path.times[i] = spec.dt * static_cast<double>(i);
  if (spec.D == 0.0) return path;

  std::mt19937_64 engine(derive_stream_seed(spec.seed, index));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = spec.dt;
  const double df_scale = std::sqrt(2.0 * spec.D * dt);
  // Conditional on df, the exact step integral is dt/2 * df + N(0, D dt^3 / 6).
  const double bridge_scale = std::sqrt(spec.D * dt * dt * dt / 6.0);

  for (std::size_t i = 0; i < steps; ++i) {
    const double df = df_scale * normal(engine);
    path.f_tilde[i + 1] = path.f_tilde[i] + df;
    double dphi = 0.5 * dt * (path.f_tilde[i] + path.f_tilde[i + 1]);
    if (spec.scheme == PathScheme::ExactJoint) dphi += bridge_scale * normal(engine);
    path.phi_tilde[i + 1] = path.phi_tilde[i] + dphi;
  }
  return path;
}

NoisePath coarsen_path(const NoisePath& path, std::size_t factor) {
  if (factor == 0) throw UsageError("coarsen factor must be >= 1");
  const std::size_t fine_steps = path.times.size() - 1;
  if (fine_steps % factor != 0) throw UsageError("coarsen factor must divide the step count");
  const std::size_t steps = fine_steps / factor;
  NoisePath out;
  out.dt = path.dt * static_cast<double>(factor);
  out.scheme = PathScheme::Trapezoid;
  out.times.resize(steps + 1);
  out.f_tilde.resize(steps + 1);
  out.phi_tilde.assign(steps + 1, 0.0);
  for (std::size_t i = 0; i <= steps; ++i) {
    out.times[i] = out.dt * static_cast<double>(i);
    out.f_tilde[i] = path.f_tilde[i * factor];
    if (i > 0) {
      out.phi_tilde[i] = out.phi_tilde[i - 1] + 0.5 * out.dt * (out.f_tilde[i - 1] + out.f_tilde[i]);
    }
  }
  return out;
}

namespace {

struct DeterministicTrack {
  std::vector<double> f;
  std::vector<double> phi;
};

DeterministicTrack track_for(std::span<const double> times, const FieldModel& field) {
  DeterministicTrack track;
  track.f.reserve(times.size());
  track.phi.reserve(times.size());
  for (double t : times) {
    track.f.push_back(field.momentum_gain(t));
    track.phi.push_back(field.displacement(t));
  }
  return track;
}

void fill_realization(double x, std::span<const double> times, double sigma,
                      const DeterministicTrack& track, const NoisePath& path, std::span<double> out) {
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    out[j] = flux_from_integrals(x, t, sigma, track.f[j] + path.f_at(t), track.phi[j] + path.phi_at(t));
  }
}

void check_times(std::span<const double> times) {
  if (times.empty()) throw UsageError("flux evaluation needs a nonempty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw DomainError("flux times must be >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw UsageError("flux times must be strictly increasing");
  }
}

}  // namespace

FluxSeries realization_flux(double x, std::span<const double> times, const PacketSpec& packet,
                            const FieldModel& field, const NoisePath& path) {
  packet.validate();
  check_times(times);
  const auto track = track_for(times, field);
  FluxSeries out{x, {times.begin(), times.end()}, std::vector<double>(times.size()), {}};
  fill_realization(x, times, packet.sigma, track, path, out.values);
  return out;
}

FluxSeries ensemble_flux_from(double x, std::span<const double> times, const PacketSpec& packet,
                              const FieldModel& field, std::size_t n_paths,
                              const std::function<NoisePath(std::size_t)>& path_for,
                              const ParallelOptions& parallel) {
  packet.validate();
  check_times(times);
  if (n_paths < 2) throw UsageError("ensemble_flux needs at least two paths");
  const auto track = track_for(times, field);
  const auto stats = ensemble_moments(
      n_paths, times.size(),
      [&](std::size_t i, std::span<double> out) {
        fill_realization(x, times, packet.sigma, track, path_for(i), out);
      },
      parallel);
  FluxSeries out{x, {times.begin(), times.end()}, stats.mean, stats.std_error};
  out.validate();
  return out;
}

FluxSeries ensemble_flux(double x, std::span<const double> times, const PacketSpec& packet,
                         const FieldModel& field, const NoiseSpec& spec, std::size_t n_paths,
                         const ParallelOptions& parallel) {
  spec.validate();
  check_times(times);
  const double t_max = std::max(times.back(), spec.dt);
  return ensemble_flux_from(
      x, times, packet, field, n_paths,
      [&](std::size_t i) { return sample_path(spec, t_max, i); }, parallel);
}

CovarianceReport covariance_report(const NoiseSpec& spec, std::span<const double> times,
                                   std::size_t n_paths, const ParallelOptions& parallel) {
  spec.validate();
  if (n_paths < 100) throw UsageError("covariance_report needs n_paths >= 100");
  check_times(times);
  const std::size_t m = times.size();
  const double t_max = std::max(times.back(), spec.dt);

  // Layout: m*m products f(ta) f(tb), then Phi^2 and Phi f per time.
  const std::size_t width = m * m + 2 * m;
  const auto stats = ensemble_moments(
      n_paths, width,
      [&](std::size_t i, std::span<double> out) {
        const auto path = sample_path(spec, t_max, i);
        std::vector<double> f(m);
        std::vector<double> phi(m);
        for (std::size_t a = 0; a < m; ++a) {
          f[a] = path.f_at(times[a]);
          phi[a] = path.phi_at(times[a]);
        }
        for (std::size_t a = 0; a < m; ++a) {
          for (std::size_t b = 0; b < m; ++b) out[a * m + b] = f[a] * f[b];
          out[m * m + 2 * a] = phi[a] * phi[a];
          out[m * m + 2 * a + 1] = phi[a] * f[a];
        }
      },
      parallel);

  CovarianceReport report;
  report.spec = spec;
  report.n_paths = n_paths;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t k = a * m + b;
      report.pairs.push_back({times[a], times[b], {stats.mean[k], stats.std_error[k]},
                              2.0 * spec.D * std::min(times[a], times[b])});
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    const double t = times[a];
    const std::size_t k = m * m + 2 * a;
    CovariancePoint p;
    p.t = t;
    p.phi2 = {stats.mean[k], stats.std_error[k]};
    p.phi2_theory = 2.0 * spec.D * t * t * t / 3.0;
    p.phi_f = {stats.mean[k + 1], stats.std_error[k + 1]};
    p.phi_f_theory_dt2 = spec.D * t * t;
    p.phi_f_theory_2dt2 = 2.0 * spec.D * t * t;
    report.points.push_back(p);
  }
  return report;
}

VarianceGrowth variance_growth(const NoiseSpec& spec, std::span<const double> times,
                               std::size_t n_paths, const ParallelOptions& parallel) {
  spec.validate();
  check_times(times);
  if (times.size() < 3) throw UsageError("variance_growth needs at least three times");
  if (n_paths < 2) throw UsageError("variance_growth needs at least two paths");
  const std::size_t m = times.size();
  const double t_max = std::max(times.back(), spec.dt);

  // Least-squares slope of <f~^2> on t is a fixed linear functional of the
  // per-path squares, so its standard error follows from path-to-path scatter.
  double t_mean = 0.0;
  for (double t : times) t_mean += t;
  t_mean /= static_cast<double>(m);
  double sxx = 0.0;
  for (double t : times) sxx += (t - t_mean) * (t - t_mean);
  std::vector<double> weights(m);
  for (std::size_t a = 0; a < m; ++a) weights[a] = (times[a] - t_mean) / sxx;

  // Layout: f, Phi, slope functional.
  const auto stats = ensemble_moments(
      n_paths, 2 * m + 1,
      [&](std::size_t i, std::span<double> out) {
        const auto path = sample_path(spec, t_max, i);
        double slope = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
          const double f = path.f_at(times[a]);
          out[a] = f;
          out[m + a] = path.phi_at(times[a]);
          slope += weights[a] * f * f;
        }
        out[2 * m] = slope;
      },
      parallel);

  VarianceGrowth growth;
  growth.times.assign(times.begin(), times.end());
  const double n = static_cast<double>(stats.n);
  std::vector<double> log_t;
  std::vector<double> log_var;
  for (std::size_t a = 0; a < m; ++a) {
    // sample variance = n * SE^2
    growth.var_f.push_back(n * stats.std_error[a] * stats.std_error[a]);
    growth.var_phi.push_back(n * stats.std_error[m + a] * stats.std_error[m + a]);
    if (growth.var_phi.back() > 0.0 && times[a] > 0.0) {
      log_t.push_back(std::log(times[a]));
      log_var.push_back(std::log(growth.var_phi.back()));
    }
  }
  growth.brownian_slope = {stats.mean[2 * m], stats.std_error[2 * m]};
  growth.phi_exponent = log_t.size() >= 3 ? fit_line(log_t, log_var).slope : 0.0;
  return growth;
}

}  // namespace wpflux
