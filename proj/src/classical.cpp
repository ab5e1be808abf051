#include "wpflux/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "wpflux/errors.hpp"

namespace wpflux {

ClassicalEnsemble simulate(const FieldModel& field, const NoiseSpec& spec, double t_max,
                           std::size_t n, const ClassicalOptions& options) {
  spec.validate();
  if (n < 1) throw UsageError("simulate needs at least one trajectory");
  if (!(t_max > 0.0)) throw UsageError("simulate requires t_max > 0");
  const std::size_t stride = std::max<std::size_t>(options.record_stride, 1);
  const double dt = spec.dt;
  const auto blocks = static_cast<std::size_t>(
      std::max(1.0, std::ceil(t_max / (dt * static_cast<double>(stride)) - 1e-9)));
  const std::size_t steps = blocks * stride;
  const std::size_t m = blocks + 1;

  std::vector<double> drift(steps);
  double f_prev = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double f_next = field.momentum_gain(dt * static_cast<double>(k + 1));
    drift[k] = f_next - f_prev;
    f_prev = f_next;
  }

  ClassicalEnsemble ens;
  ens.n = n;
  ens.spec = spec;
  ens.times.resize(m);
  for (std::size_t k = 0; k < m; ++k) ens.times[k] = dt * static_cast<double>(k * stride);
  ens.x.assign(n * m, 0.0);
  ens.y.assign(n * m, 0.0);

  const double dw_scale = std::sqrt(2.0 * spec.D * dt);
  parallel_for(
      n,
      [&](std::size_t i) {
        std::mt19937_64 engine(derive_stream_seed(spec.seed, i));
        std::normal_distribution<double> normal(0.0, 1.0);
        double x = 0.0;
        double y = 0.0;
        double* xs = ens.x.data() + i * m;
        double* ys = ens.y.data() + i * m;
        for (std::size_t k = 0; k < steps; ++k) {
          const double dw = spec.D == 0.0 ? 0.0 : dw_scale * normal(engine);
          const double y_next = y + drift[k] + dw;
          x += 0.5 * dt * (y + y_next);
          y = y_next;
          if ((k + 1) % stride == 0) {
            xs[(k + 1) / stride] = x;
            ys[(k + 1) / stride] = y;
          }
        }
      },
      options.parallel);
  return ens;
}

ClassicalMoments moment_series(const ClassicalEnsemble& ens) {
  const std::size_t m = ens.times.size();
  MomentAccumulator acc(3 * m);
  std::vector<double> row(3 * m);
  for (std::size_t i = 0; i < ens.n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double y = ens.y_at(i, k);
      row[k] = ens.x_at(i, k);
      row[m + k] = y;
      row[2 * m + k] = 0.5 * y * y;
    }
    acc.add(row);
  }
  const auto s = acc.stats();
  ClassicalMoments out;
  out.times = ens.times;
  auto slice = [&](const std::vector<double>& v, std::size_t off) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(off),
                               v.begin() + static_cast<std::ptrdiff_t>(off + m));
  };
  out.mean_x = slice(s.mean, 0);
  out.se_x = slice(s.std_error, 0);
  out.mean_y = slice(s.mean, m);
  out.se_y = slice(s.std_error, m);
  out.mean_energy = slice(s.mean, 2 * m);
  out.se_energy = slice(s.std_error, 2 * m);
  out.var_y.resize(m);
  const double n = static_cast<double>(ens.n);
  for (std::size_t k = 0; k < m; ++k) out.var_y[k] = n * out.se_y[k] * out.se_y[k];
  return out;
}

EnergyRateReport energy_rate_report(const ClassicalEnsemble& ens, const FieldModel& field) {
  if (ens.n < 100) throw UsageError("energy_rate_report needs n >= 100 trajectories");
  const std::size_t m = ens.times.size();
  const auto moments = moment_series(ens);
  EnergyRateReport report;
  std::vector<double> rates(ens.n);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double ta = ens.times[k];
    const double tb = ens.times[k + 1];
    const double span = tb - ta;
    for (std::size_t i = 0; i < ens.n; ++i) {
      const double ya = ens.y_at(i, k);
      const double yb = ens.y_at(i, k + 1);
      rates[i] = (yb * yb - ya * ya) / (2.0 * span);
    }
    const auto est = mean_with_std_error(rates);
    const double e_bar = (field.momentum_gain(tb) - field.momentum_gain(ta)) / span;
    EnergyRateRow row;
    row.t_mid = 0.5 * (ta + tb);
    row.empirical = est.mean;
    row.std_error = est.std_error;
    row.theory = e_bar * 0.5 * (moments.mean_y[k] + moments.mean_y[k + 1]) + ens.spec.D;
    const double dev = std::abs(row.empirical - row.theory);
    const double floor = 1e-9 * std::max(1.0, std::abs(row.theory));
    row.deviation_se = dev <= floor ? 0.0
                       : row.std_error > 0.0 ? dev / row.std_error
                                             : std::numeric_limits<double>::infinity();
    report.max_deviation_se = std::max(report.max_deviation_se, row.deviation_se);
    report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
    report.rows.push_back(row);
  }
  return report;
}

MomentEstimate pumping_rate_fit(const ClassicalEnsemble& ens, double t_lo, double t_hi) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < ens.times.size(); ++k) {
    if (ens.times[k] >= t_lo && ens.times[k] <= t_hi) idx.push_back(k);
  }
  if (idx.size() < 3) throw UsageError("pumping_rate_fit: fewer than three samples in the window");
  if (ens.n < 2) throw UsageError("pumping_rate_fit needs at least two trajectories");
  const auto moments = moment_series(ens);

  double t_mean = 0.0;
  for (auto k : idx) t_mean += ens.times[k];
  t_mean /= static_cast<double>(idx.size());
  double sxx = 0.0;
  for (auto k : idx) sxx += (ens.times[k] - t_mean) * (ens.times[k] - t_mean);

  // Slope of the centered half-square is a fixed linear functional per
  // trajectory; its scatter gives the standard error.
  const double bessel = static_cast<double>(ens.n) / static_cast<double>(ens.n - 1);
  std::vector<double> per_traj(ens.n);
  for (std::size_t i = 0; i < ens.n; ++i) {
    double b = 0.0;
    for (auto k : idx) {
      const double dy = ens.y_at(i, k) - moments.mean_y[k];
      b += (ens.times[k] - t_mean) / sxx * 0.5 * dy * dy * bessel;
    }
    per_traj[i] = b;
  }
  const auto est = mean_with_std_error(per_traj);
  return {est.mean, est.std_error};
}

namespace {

// First moment of the noise-averaged density by trapezoidal quadrature over
// +-12 widths around the deterministic center.
double averaged_density_center(double t, const PacketSpec& packet, const FieldModel& field,
                               double D) {
  const double phi0 = field.displacement(t);
  const double sigma2 = packet.sigma * packet.sigma;
  const double S = sigma2 + 4.0 * D * t * t * t / 3.0 + t * t / sigma2;
  const double half = 12.0 * std::sqrt(S);
  const std::size_t n = 4000;
  const double h = 2.0 * half / static_cast<double>(n);
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = phi0 - half + h * static_cast<double>(i);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double rho = averaged_density(x, t, packet, field, D);
    m0 += w * rho;
    m1 += w * rho * (x - phi0);
  }
  return phi0 + m1 / m0;
}

}  // namespace

CrosscheckReport quantum_classical_crosscheck(const FieldModel& field, const NoiseSpec& spec,
                                              const PacketSpec& packet,
                                              const std::optional<GridSpec>& grid,
                                              std::span<const double> t_probe, std::size_t n,
                                              const ClassicalOptions& options) {
  packet.validate();
  if (t_probe.empty()) throw UsageError("crosscheck needs at least one probe time");
  const double t_max = *std::max_element(t_probe.begin(), t_probe.end());
  if (!(t_max > 0.0)) throw UsageError("crosscheck probe times must include t > 0");

  // Record on every integrator step so probe times resolve to one node.
  ClassicalOptions opts = options;
  opts.record_stride = 1;
  const auto ens = simulate(field, spec, t_max, n, opts);
  const auto moments = moment_series(ens);
  // The noiseless trajectory measures the integrator's own bias against Phi.
  NoiseSpec quiet = spec;
  quiet.D = 0.0;
  const auto reference = simulate(field, quiet, t_max, 1, opts);

  std::vector<double> tdse_centers(t_probe.size(), std::numeric_limits<double>::quiet_NaN());
  if (grid) {
    std::vector<double> sorted(t_probe.begin(), t_probe.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    TdseOptions topts;
    topts.base_grid = *grid;
    const auto run = tdse_flux_series(0.0, sorted, packet, field, topts);
    for (std::size_t p = 0; p < t_probe.size(); ++p) {
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), t_probe[p]);
      tdse_centers[p] = run.observables[static_cast<std::size_t>(it - sorted.begin())].mean_x;
    }
  }

  CrosscheckReport report;
  for (std::size_t p = 0; p < t_probe.size(); ++p) {
    const double t = t_probe[p];
    const auto it = std::lower_bound(ens.times.begin(), ens.times.end(), t - 1e-9);
    const auto k = std::min(static_cast<std::size_t>(it - ens.times.begin()), ens.times.size() - 1);
    CrosscheckRow row;
    row.t = ens.times[k];
    row.classical_x = moments.mean_x[k];
    row.classical_se = moments.se_x[k];
    row.quantum_center = averaged_density_center(row.t, packet, field, spec.D);
    row.tdse_center = tdse_centers[p];
    const double scale = std::max(1.0, std::abs(row.quantum_center));
    const double bias = 2.0 * std::abs(reference.x_at(0, k) - field.displacement(row.t));
    const double tol = 3.0 * row.classical_se + bias + 1e-9 * scale;
    row.agree = std::abs(row.classical_x - row.quantum_center) <= tol;
    if (grid) {
      // The TDSE center is noiseless and should reproduce the quantum center.
      row.agree = row.agree && std::abs(row.tdse_center - row.quantum_center) <= 1e-6 * scale;
    }
    report.all_agree = report.all_agree && row.agree;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace wpflux
