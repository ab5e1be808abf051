#include "wpflux/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "wpflux/analytic.hpp"
#include "wpflux/classical.hpp"
#include "wpflux/errors.hpp"
#include "wpflux/experiments.hpp"
#include "wpflux/stochastic.hpp"

namespace wpflux {

ValidationOptions ValidationOptions::from_config(const ExperimentConfig& config) {
  config.validate();
  ValidationOptions o;
  o.sigma = config.packet.sigma;
  o.x_obs = config.x_obs;
  o.t_max = config.t_max;
  o.t_samples = config.t_samples;
  o.d_sweep = config.d_list;
  o.noise_D = config.noise_D;
  o.n_paths = config.n_paths;
  o.seed = config.seed;
  o.noise_dt = config.noise_dt;
  o.drift_coefficient = config.drift_coefficient;
  o.covariance_times = config.covariance_times;
  o.run_tdse = config.validate_tdse;
  o.tdse_grid = config.tdse_grid;
  o.parallel.workers = config.workers;
  return o;
}

namespace {

std::string num(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

PacketSpec packet_of(const ValidationOptions& o) { return PacketSpec{o.sigma, 0.0}; }

FieldModel sample_tabulated() {
  std::vector<double> t;
  std::vector<double> e;
  for (int i = 0; i <= 240; ++i) {
    t.push_back(0.5 * i);
    e.push_back(0.2 * std::sin(0.3 * t.back()) * std::exp(-0.01 * t.back()));
  }
  return FieldModel::tabulated(std::move(t), std::move(e));
}

std::vector<std::pair<std::string, FieldModel>> reference_fields() {
  return {{"zero", FieldModel::zero()},
          {"constant(0.3)", FieldModel::constant(0.3)},
          {"femto(0.1, 0.114)", FieldModel::femto_pulse(0.1, 0.114)},
          {"tabulated", sample_tabulated()}};
}

std::vector<double> positive_sweep(const ValidationOptions& o) {
  std::vector<double> out;
  for (double d : o.d_sweep) {
    if (d > 0.0) out.push_back(d);
  }
  return out;
}

NoiseSpec noise_of(const ValidationOptions& o, double D) {
  NoiseSpec spec;
  spec.D = D;
  spec.dt = o.noise_dt;
  spec.seed = o.seed;
  return spec;
}

}  // namespace

CheckResult check_d0_reduction(const ValidationOptions& o) {
  CheckResult r{1, "D = 0 reduction of the averaged flux", true, {}};
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> ux(-50.0, 100.0), ut(0.0, 100.0), us(0.3, 3.0),
      ue(-1.0, 1.0);
  double worst = 0.0;
  int identical = 0;
  constexpr int n = 1000;
  for (int i = 0; i < n; ++i) {
    const double x = ux(rng), t = ut(rng), sigma = us(rng), E = ue(rng);
    const auto field = FieldModel::constant(E);
    const PacketSpec packet{sigma, 0.0};
    const double a = averaged_flux(x, t, packet, field, 0.0, DriftModel{o.drift_coefficient});
    const double g = gaussian_flux(x, t, packet, field);
    const double scale = std::max(std::abs(a), std::abs(g));
    const double rel = scale == 0.0 ? 0.0 : std::abs(a - g) / scale;
    worst = std::max(worst, rel);
    identical += (a == g);
  }
  r.passed = worst < 1e-12;
  r.detail = "max relative deviation " + num(worst) + " over " + std::to_string(n) +
             " random (x, t, sigma, E), " + std::to_string(identical) +
             " bit-identical (threshold 1e-12)";
  return r;
}

std::vector<CheckResult> check_tdse_oracle(const ValidationOptions& o) {
  std::vector<CheckResult> out;
  if (!o.run_tdse) {
    out.push_back({2, "analytic vs TDSE flux", true, "skipped (validate.tdse = false)"});
    return out;
  }
  const auto times = uniform_grid(0.0, o.t_max, o.t_samples);
  const PacketSpec packet = packet_of(o);
  const std::pair<std::string, FieldModel> fields[] = {
      {"constant(0.3)", FieldModel::constant(0.3)},
      {"femto(0.1, 0.114)", FieldModel::femto_pulse(0.1, 0.114)}};

  CheckResult gate{2, "analytic vs TDSE flux", true, {}};
  CheckResult info{2, "analytic vs TDSE flux on the unwidened base grid", true, {}, true};
  for (const auto& [name, field] : fields) {
    const auto analytic = gaussian_flux_series(o.x_obs, times, packet, field);
    TdseOptions opts;
    opts.base_grid = o.tdse_grid;
    const auto run = tdse_flux_series(o.x_obs, times, packet, field, opts);
    double dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      dev = std::max(dev, std::abs(analytic.values[i] - run.flux.values[i]));
    }
    gate.passed = gate.passed && dev < 1e-3;
    if (!gate.detail.empty()) gate.detail += "; ";
    gate.detail += name + ": max |dj| " + num(dev) + " on [" + num(run.grid.x_min, 6) + ", " +
                   num(run.grid.x_max, 6) + "], n = " + std::to_string(run.grid.n);

    if (o.tdse_literal_grid_info) {
      TdseOptions lit;
      lit.base_grid = o.tdse_grid;
      lit.auto_domain = false;
      lit.boundary_tolerance = 0.0;
      const auto raw = tdse_flux_series(o.x_obs, times, packet, field, lit);
      double dev_raw = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        dev_raw = std::max(dev_raw, std::abs(analytic.values[i] - raw.flux.values[i]));
      }
      info.passed = info.passed && dev_raw < 1e-3;
      if (!info.detail.empty()) info.detail += "; ";
      info.detail += name + ": max |dj| " + num(dev_raw);
    }
  }
  gate.detail += " (threshold 1e-3)";
  out.push_back(gate);
  if (o.tdse_literal_grid_info) {
    info.detail += " on [" + num(o.tdse_grid.x_min) + ", " + num(o.tdse_grid.x_max) +
                   "], n = " + std::to_string(o.tdse_grid.n) + " (not gating)";
    out.push_back(info);
  }
  return out;
}

namespace {

// Fraction of samples (where mask is set) at which the closed form lies
// inside the 3-SE band of the Monte Carlo estimate.
double fraction_in_band(const FluxSeries& mc, const FluxSeries& analytic,
                        const std::vector<char>& mask) {
  std::size_t inside = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < mc.values.size(); ++i) {
    if (!mask[i]) continue;
    ++total;
    const double dev = std::abs(mc.values[i] - analytic.values[i]);
    const double floor = 1e-12 * std::abs(analytic.values[i]);
    inside += dev <= 3.0 * mc.std_error[i] + floor;
  }
  return total == 0 ? 1.0 : static_cast<double>(inside) / static_cast<double>(total);
}

// The average at (x, t) is carried by paths whose displacement sits
// 2 |x - Phi0| sqrt(V) / S standard deviations out in the tail
// (V = 2 D t^3 / 3). Beyond ~3 a plain ensemble of 1e4 paths rarely visits
// them and both its mean and its standard error are biased low.
double tail_depth(double x, double t, double sigma, const FieldModel& field, double D) {
  const double V = 2.0 * D * t * t * t / 3.0;
  const double S = sigma * sigma + t * t / (sigma * sigma) + 2.0 * V;
  return 2.0 * std::abs(x - field.displacement(t)) * std::sqrt(V) / S;
}

}  // namespace

std::vector<CheckResult> check_averaged_vs_mc(const ValidationOptions& o) {
  CheckResult r{3, "averaged flux vs Monte Carlo", true, {}};
  CheckResult resolved{3, "averaged flux vs Monte Carlo where the ensemble resolves the mean",
                       true, {}};
  auto sweep = positive_sweep(o);
  if (sweep.empty()) sweep.push_back(0.0);
  const auto times = uniform_grid(0.0, o.t_max, o.t_samples);
  const auto field = FieldModel::constant(0.3);
  const PacketSpec packet = packet_of(o);
  const std::vector<char> all(times.size(), 1);
  std::string alt;
  std::string alt_resolved;
  for (double D : sweep) {
    const auto mc = ensemble_flux(o.x_obs, times, packet, field, noise_of(o, D), o.n_paths,
                                  o.parallel);
    const auto avg =
        averaged_flux_series(o.x_obs, times, packet, field, D, DriftModel{o.drift_coefficient});
    std::vector<char> mask(times.size());
    std::size_t n_resolved = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      mask[i] = tail_depth(o.x_obs, times[i], o.sigma, field, D) <= 3.0;
      n_resolved += mask[i];
    }
    const double frac = fraction_in_band(mc, avg, all);
    const double frac_resolved = fraction_in_band(mc, avg, mask);
    r.passed = r.passed && frac >= 0.99;
    resolved.passed = resolved.passed && frac_resolved >= 0.99;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += "D = " + num(D) + ": " + num(100.0 * frac, 5) + "% inside 3 SE";
    if (!resolved.detail.empty()) resolved.detail += "; ";
    resolved.detail += "D = " + num(D) + ": " + num(100.0 * frac_resolved, 5) + "% of " +
                       std::to_string(n_resolved) + " times";
    if (o.drift_coefficient != 1.0 && D > 0.0) {
      const auto other = averaged_flux_series(o.x_obs, times, packet, field, D, DriftModel{1.0});
      if (!alt.empty()) alt += ", ";
      alt += num(100.0 * fraction_in_band(mc, other, all), 4) + "%";
      if (!alt_resolved.empty()) alt_resolved += ", ";
      alt_resolved += num(100.0 * fraction_in_band(mc, other, mask), 4) + "%";
    }
  }
  r.detail += " (need >= 99% of " + std::to_string(times.size()) + " times, drift coefficient " +
              num(o.drift_coefficient) + ", n = " + std::to_string(o.n_paths) + ")";
  if (!alt.empty()) r.detail += "; coefficient 1 would give " + alt;
  resolved.detail += " inside 3 SE where the dominant paths lie within 3 sd (need >= 99%)";
  if (!alt_resolved.empty()) resolved.detail += "; coefficient 1 would give " + alt_resolved;
  return {r, resolved};
}

CheckResult check_noise_covariance(const ValidationOptions& o) {
  CheckResult r{4, "noise covariance suite", true, {}};
  NoiseSpec spec = noise_of(o, o.noise_D);
  spec.scheme = PathScheme::ExactJoint;
  std::vector<double> times = o.covariance_times;
  std::sort(times.begin(), times.end());
  const auto cov = covariance_report(spec, times, o.n_paths, o.parallel);

  double worst_ff = 0.0;
  for (const auto& p : cov.pairs) {
    const double dev = std::abs(p.ff.estimate - p.theory);
    worst_ff = std::max(worst_ff, dev == 0.0 ? 0.0 : dev / p.ff.std_error);
  }
  double worst_phi = 0.0;
  for (const auto& p : cov.points) {
    const double dev = std::abs(p.phi2.estimate - p.phi2_theory);
    worst_phi = std::max(worst_phi, dev == 0.0 ? 0.0 : dev / p.phi2.std_error);
  }
  std::vector<double> growth_times;
  for (int i = 0; i < 50; ++i) growth_times.push_back(std::pow(50.0, i / 49.0));
  NoiseSpec growth_spec = spec;
  growth_spec.scheme = PathScheme::Trapezoid;
  const auto growth = variance_growth(growth_spec, growth_times, o.n_paths, o.parallel);

  const bool noiseless = o.noise_D == 0.0;
  const bool exponent_ok = noiseless || std::abs(growth.phi_exponent - 3.0) <= 0.1;
  r.passed = worst_ff <= 3.0 && worst_phi <= 3.0 && exponent_ok;
  r.detail = "D = " + num(o.noise_D) + ", " + std::to_string(times.size()) + "x" +
             std::to_string(times.size()) + " <f f> worst " + num(worst_ff, 3) +
             " SE, <Phi^2> worst " + num(worst_phi, 3) + " SE (limit 3), Var[Phi] exponent " +
             (noiseless ? std::string("n/a") : num(growth.phi_exponent, 5)) + " (3 +- 0.1)";
  // Which candidate the cross moment selects, at the largest time.
  if (!noiseless && !cov.points.empty()) {
    const auto& p = cov.points.back();
    r.detail += "; <Phi f>(" + num(p.t) + ") = " + num(p.phi_f.estimate) + " +- " +
                num(p.phi_f.std_error, 2) + " vs D t^2 = " + num(p.phi_f_theory_dt2) +
                ", 2 D t^2 = " + num(p.phi_f_theory_2dt2);
  }
  return r;
}

CheckResult check_figure1(const ValidationOptions& o) {
  CheckResult r{5, "figure 1 amplitude and width ordering", true, {}};
  auto sweep = o.d_sweep;
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  if (sweep.size() < 2) {
    r.detail = "not applicable: the sweep has a single D";
    return r;
  }
  const auto times = uniform_grid(0.0, o.t_max, o.t_samples);
  const auto field = FieldModel::constant(0.3);
  std::vector<double> peaks;
  std::vector<double> widths;
  for (double D : sweep) {
    const auto s =
        averaged_flux_series(o.x_obs, times, packet_of(o), field, D, DriftModel{o.drift_coefficient});
    peaks.push_back(peak_abs(s.values));
    widths.push_back(half_max_width(times, s.values));
  }
  std::string p = "peaks";
  std::string w = "widths";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    p += " " + num(peaks[i]);
    w += " " + num(widths[i]);
    if (i > 0) r.passed = r.passed && peaks[i] < peaks[i - 1] && widths[i] > widths[i - 1];
  }
  r.detail = p + "; " + w + " over D";
  for (double D : sweep) r.detail += " " + num(D);
  return r;
}

CheckResult check_figure2(const ValidationOptions& o) {
  CheckResult r{6, "figure 2 enhancement then reversal", true, {}};
  const auto sweep = positive_sweep(o);
  if (sweep.empty()) {
    r.detail = "not applicable: the sweep has no D > 0";
    return r;
  }
  const auto times = uniform_grid(0.0, o.t_max, o.t_samples);
  const auto field = FieldModel::femto_pulse(0.1, 0.114);
  const DriftModel drift{o.drift_coefficient};
  const auto base = averaged_flux_series(o.x_obs, times, packet_of(o), field, 0.0, drift);
  for (double D : sweep) {
    const auto s = averaged_flux_series(o.x_obs, times, packet_of(o), field, D, drift);
    const auto up = windows_where_greater(times, s.values, base.values);
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += "D = " + num(D) + ": ";
    if (up.empty()) {
      r.passed = false;
      r.detail += "no enhancement window";
      continue;
    }
    const auto down = windows_where_greater(times, base.values, s.values);
    const auto later = std::find_if(down.begin(), down.end(), [&](const TimeWindow& w) {
      return w.begin >= up.front().end - 1e-12;
    });
    r.detail += "enhanced on [" + num(up.front().begin, 3) + ", " + num(up.front().end, 3) + "]";
    if (later == down.end()) {
      r.passed = false;
      r.detail += ", no later reversal";
      continue;
    }
    r.detail += ", reversed from " + num(later->begin, 3);
    // The crossover is only expected to be of the order of t = 30.
    const bool order = up.front().end >= 3.0 && up.front().end <= 300.0;
    r.passed = r.passed && order;
    if (!order) r.detail += " (crossover not of order 30)";
  }
  return r;
}

CheckResult check_furutsu_novikov(const ValidationOptions& o) {
  CheckResult r{7, "classical Furutsu-Novikov pumping", true, {}};
  const auto field = FieldModel::zero();
  ClassicalOptions opts;
  opts.parallel = o.parallel;
  const double t_max = 50.0;
  const auto noisy = simulate(field, noise_of(o, o.noise_D), t_max, o.n_paths, opts);
  const auto quiet = simulate(field, noise_of(o, 0.0), t_max, o.n_paths, opts);
  const auto mn = moment_series(noisy);
  const auto mq = moment_series(quiet);
  const auto fit = pumping_rate_fit(noisy, 0.0, t_max);

  double worst = 0.0;
  for (std::size_t k = 0; k < mn.times.size(); ++k) {
    const double dev = std::abs(mn.mean_x[k] - mq.mean_x[k]);
    if (dev == 0.0) continue;
    worst = std::max(worst, mn.se_x[k] > 0.0 ? dev / mn.se_x[k] : INFINITY);
  }
  const double rel = o.noise_D == 0.0 ? std::abs(fit.estimate)
                                      : std::abs(fit.estimate - o.noise_D) / o.noise_D;
  const bool rate_ok = o.noise_D == 0.0 ? fit.estimate == 0.0 : rel <= 0.05;
  r.passed = rate_ok && worst < 3.0;
  r.detail = "pumping rate " + num(fit.estimate, 5) + " +- " + num(fit.std_error, 2) +
             " vs D = " + num(o.noise_D) + " (" + num(100.0 * rel, 3) +
             "%, limit 5%); <x> shift worst " + num(worst, 3) + " SE (limit 3)";
  return r;
}

CheckResult check_continuity(const ValidationOptions& o) {
  CheckResult r{8, "continuity of the closed forms", true, {}};
  const double h = 1e-4;
  const PacketSpec packet = packet_of(o);
  const auto xs = uniform_grid(-30.0, 60.0, 50);
  const auto ts = uniform_grid(0.5, o.t_max, 50);
  double worst_all = 0.0;
  for (const auto& [name, field] : reference_fields()) {
    if (field.max_time() < o.t_max + h) continue;
    double worst = 0.0;
    for (double t : ts) {
      for (double x : xs) {
        const double drho = (gaussian_density(x, t + h, packet, field) -
                             gaussian_density(x, t - h, packet, field)) / (2.0 * h);
        const double dj = (gaussian_flux(x + h, t, packet, field) -
                           gaussian_flux(x - h, t, packet, field)) / (2.0 * h);
        worst = std::max(worst, std::abs(drho + dj));
      }
    }
    r.detail += (r.detail.empty() ? "" : ", ") + name + " " + num(worst, 3);
    worst_all = std::max(worst_all, worst);
  }
  r.passed = worst_all < 1e-6;
  r.detail = "max residual on 50x50 lattice: " + r.detail + " (threshold 1e-6)";
  return r;
}

CheckResult check_zero_flux_locus(const ValidationOptions& o) {
  CheckResult r{9, "zero-flux locus", true, {}};
  const auto ts = uniform_grid(0.5, o.t_max, 200);
  double worst_flux = 0.0;
  for (const auto& [name, field] : reference_fields()) {
    if (field.max_time() < o.t_max) continue;
    for (double sigma : {0.5, 1.0, 2.0}) {
      const PacketSpec packet{sigma, 0.0};
      for (double t : ts) {
        const double x0 = zero_flux_point(t, packet, field);
        worst_flux = std::max(worst_flux, std::abs(gaussian_flux(x0, t, packet, field)));
      }
    }
  }
  double worst_rel = 0.0;
  for (double E : {0.3, -0.7, 1.5}) {
    const auto field = FieldModel::constant(E);
    for (double t : ts) {
      const double x0 = zero_flux_point(t, PacketSpec{1.0, 0.0}, field);
      const double expect = -E * (1.0 + t * t / 2.0);
      worst_rel = std::max(worst_rel, std::abs(x0 - expect) / std::abs(expect));
    }
  }
  r.passed = worst_flux <= 1e-12 && worst_rel <= 1e-12;
  r.detail = "max |j(x0)| " + num(worst_flux, 3) + " (threshold 1e-12); constant field vs " +
             "-E(1 + t^2/2) max relative " + num(worst_rel, 3);
  return r;
}

CheckResult check_plane_wave(const ValidationOptions& o) {
  CheckResult r{10, "plane-wave flux", true, {}};
  const auto ts = uniform_grid(0.0, o.t_max, 101);
  std::size_t checked = 0;
  std::size_t mismatched = 0;
  for (const auto& [name, field] : reference_fields()) {
    if (field.max_time() < o.t_max) continue;
    for (double k0 : {-1.25, 0.0, 0.5, 3.0}) {
      for (double t : ts) {
        ++checked;
        mismatched += plane_wave_flux(k0, t, field) != k0 + field.momentum_gain(t);
      }
    }
  }
  r.passed = mismatched == 0;
  r.detail = std::to_string(checked - mismatched) + "/" + std::to_string(checked) +
             " samples equal k0 + f(t) exactly over zero, constant, pulse, tabulated fields";
  return r;
}

std::vector<CheckResult> run_validation(const ValidationOptions& o) {
  std::vector<CheckResult> out;
  out.push_back(check_d0_reduction(o));
  for (auto& c : check_tdse_oracle(o)) out.push_back(std::move(c));
  for (auto& c : check_averaged_vs_mc(o)) out.push_back(std::move(c));
  out.push_back(check_noise_covariance(o));
  out.push_back(check_figure1(o));
  out.push_back(check_figure2(o));
  out.push_back(check_furutsu_novikov(o));
  out.push_back(check_continuity(o));
  out.push_back(check_zero_flux_locus(o));
  out.push_back(check_plane_wave(o));
  return out;
}

std::string format_line(const CheckResult& c) {
  const char* status = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
  std::ostringstream s;
  s << status << " [" << c.criterion << "] " << c.name << ": " << c.detail;
  return s.str();
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::string out = "criterion\tcheck\tstatus\tdetail\n";
  for (const auto& c : results) {
    out += std::to_string(c.criterion) + '\t' + c.name + '\t' +
           (c.informational ? "info" : (c.passed ? "pass" : "fail")) + '\t' + c.detail + '\n';
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& c) { return c.informational || c.passed; });
}

}  // namespace wpflux
