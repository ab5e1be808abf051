#include "wpflux/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wpflux/analytic.hpp"
#include "wpflux/classical.hpp"
#include "wpflux/errors.hpp"
#include "wpflux/stochastic.hpp"
#include "wpflux/tdse.hpp"

namespace wpflux {

std::string column_name(Route route, double D) {
  return to_string(route) + ":D=" + format_double(D);
}

namespace {

ParallelOptions parallel_of(const ExperimentConfig& config) {
  ParallelOptions p;
  p.workers = config.workers;
  return p;
}

std::string field_label(const ExperimentConfig& config) {
  if (config.field_kind == "zero") return "zero field";
  if (config.field_kind == "constant") return "constant field E = " + format_double(config.field_E);
  if (config.field_kind == "femto") {
    return "pulse E0 = " + format_double(config.pulse_amplitude) +
           ", omega = " + format_double(config.pulse_omega);
  }
  return "tabulated field " + config.field_file;
}

void emit(const SeriesCollection& data, const ExperimentConfig& config, const std::string& stem,
          RunReport& report) {
  const auto base = config.out_dir / stem;
  if (config.format != OutputFormat::Svg) {
    auto path = base;
    path += ".csv";
    emit_csv(data, path);
    report.files.push_back(path);
  }
  if (config.format != OutputFormat::Csv) {
    auto path = base;
    path += ".svg";
    emit_svg(data, path);
    report.files.push_back(path);
  }
}

void prepare(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir.string());
}

}  // namespace

FluxTable flux_table(const ExperimentConfig& config, bool with_field_column) {
  config.validate();
  if (config.has_route(Route::Classical)) {
    throw UsageError("routes: the classical route has no flux; use the classical subcommand");
  }
  const FieldModel field = config.make_field();
  const auto times = config.time_grid();
  const DriftModel drift{config.drift_coefficient};

  FluxTable table;
  table.data.x = times;
  table.data.title = "Flux at x = " + format_double(config.x_obs) + ", " + field_label(config);

  std::optional<FluxSeries> analytic;
  std::optional<TdseRun> tdse;
  for (Route route : config.routes) {
    for (double D : config.d_list) {
      Series s;
      s.name = column_name(route, D);
      switch (route) {
        case Route::Analytic:
          if (!analytic) {
            analytic = gaussian_flux_series(config.x_obs, times, config.packet, field);
          }
          s.values = analytic->values;
          break;
        case Route::Averaged:
          s.values = averaged_flux_series(config.x_obs, times, config.packet, field, D, drift).values;
          break;
        case Route::MonteCarlo: {
          auto mc = ensemble_flux(config.x_obs, times, config.packet, field, config.noise(D),
                                  config.n_paths, parallel_of(config));
          s.values = mc.values;
          s.error = mc.std_error;
          if (!table.std_error) {
            table.std_error.emplace();
            table.std_error->x = times;
          }
          table.std_error->series.push_back({s.name, mc.std_error, {}});
          break;
        }
        case Route::Tdse:
          if (!tdse) {
            TdseOptions opts;
            opts.base_grid = config.tdse_grid;
            opts.auto_domain = config.tdse_auto_domain;
            tdse = tdse_flux_series(config.x_obs, times, config.packet, field, opts);
            table.tdse_grid = tdse->grid;
          }
          s.values = tdse->flux.values;
          break;
        case Route::Classical:
          break;
      }
      table.data.series.push_back(std::move(s));
    }
  }
  if (with_field_column) {
    Series e;
    e.name = "field";
    e.secondary_axis = true;
    e.dotted = true;
    e.values.reserve(times.size());
    for (double t : times) e.values.push_back(field.field_at(t));
    table.data.series.push_back(std::move(e));
    table.data.y2_label = "E(t) (dimensionless)";
  }
  return table;
}

std::filesystem::path write_manifest(const ExperimentConfig& config, const std::string& command) {
  auto path = config.out_dir / (command + ".manifest.txt");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# wpflux run manifest\n"
      << "# command: " << command << '\n'
      << "# version: " << WPFLUX_VERSION << '\n'
      << "# seed: " << config.seed << '\n'
      << config.to_text();
  if (!out) throw IoError("failed while writing " + path.string());
  return path;
}

namespace {

std::string flux_summary(const FluxTable& table) {
  std::ostringstream s;
  s.precision(6);
  for (const auto& series : table.data.series) {
    if (series.secondary_axis) continue;
    s << series.name << ": peak |j| = " << peak_abs(series.values)
      << ", half-max width = " << half_max_width(table.data.x, series.values) << '\n';
  }
  if (table.tdse_grid) {
    s << "tdse grid: [" << table.tdse_grid->x_min << ", " << table.tdse_grid->x_max
      << "], n = " << table.tdse_grid->n << '\n';
  }
  return s.str();
}

RunReport run_flux_command(const ExperimentConfig& config, const std::string& command,
                           bool with_field, FluxTable& table) {
  prepare(config);
  table = flux_table(config, with_field);
  RunReport report;
  emit(table.data, config, command, report);
  if (table.std_error && config.format != OutputFormat::Svg) {
    auto path = config.out_dir / (command + "_stderr.csv");
    emit_csv(*table.std_error, path);
    report.files.push_back(path);
  }
  report.files.push_back(write_manifest(config, command));
  report.summary = flux_summary(table);
  return report;
}

}  // namespace

RunReport run_figure1(const ExperimentConfig& config) {
  FluxTable table;
  return run_flux_command(config, "figure1", false, table);
}

RunReport run_figure2(const ExperimentConfig& config) {
  FluxTable table;
  auto report = run_flux_command(config, "figure2", true, table);
  // Enhancement windows of each D > 0 curve against the D = 0 curve of the
  // same route.
  const auto& data = table.data;
  std::ostringstream s;
  s.precision(4);
  for (Route route : config.routes) {
    const auto base = std::find_if(data.series.begin(), data.series.end(), [&](const Series& x) {
      return x.name == column_name(route, 0.0);
    });
    if (base == data.series.end() || route == Route::Analytic || route == Route::Tdse) continue;
    for (double D : config.d_list) {
      if (D == 0.0) continue;
      const auto it = std::find_if(data.series.begin(), data.series.end(),
                                   [&](const Series& x) { return x.name == column_name(route, D); });
      s << it->name << " exceeds D=0 on:";
      for (const auto& w : windows_where_greater(data.x, it->values, base->values, 1e-12)) {
        s << " [" << w.begin << ", " << w.end << "]";
      }
      s << '\n';
    }
  }
  report.summary += s.str();
  return report;
}

RunReport run_flux(const ExperimentConfig& config) {
  FluxTable table;
  return run_flux_command(config, "flux", false, table);
}

RunReport run_covariance(const ExperimentConfig& config) {
  prepare(config);
  const NoiseSpec spec = config.noise(config.noise_D);
  std::vector<double> times = config.covariance_times;
  std::sort(times.begin(), times.end());
  const auto cov = covariance_report(spec, times, config.n_paths, parallel_of(config));

  SeriesCollection pairs;
  pairs.x_name = "t1";
  Series t2{"t2", {}, {}}, ff{"ff", {}, {}}, ff_se{"ff_se", {}, {}}, ff_th{"ff_theory", {}, {}};
  for (const auto& p : cov.pairs) {
    pairs.x.push_back(p.t1);
    t2.values.push_back(p.t2);
    ff.values.push_back(p.ff.estimate);
    ff_se.values.push_back(p.ff.std_error);
    ff_th.values.push_back(p.theory);
  }
  pairs.series = {t2, ff, ff_se, ff_th};

  SeriesCollection points;
  points.title = "Path moments, D = " + format_double(spec.D) + ", n = " +
                 std::to_string(config.n_paths);
  points.y_label = "moment (dimensionless)";
  Series phi2{"phi2", {}, {}}, phi2_th{"phi2_theory", {}, {}}, phif{"phi_f", {}, {}},
      phif_1{"phi_f_theory_Dt2", {}, {}}, phif_2{"phi_f_theory_2Dt2", {}, {}};
  for (const auto& p : cov.points) {
    points.x.push_back(p.t);
    phi2.values.push_back(p.phi2.estimate);
    phi2.error.push_back(p.phi2.std_error);
    phi2_th.values.push_back(p.phi2_theory);
    phif.values.push_back(p.phi_f.estimate);
    phif.error.push_back(p.phi_f.std_error);
    phif_1.values.push_back(p.phi_f_theory_dt2);
    phif_2.values.push_back(p.phi_f_theory_2dt2);
  }
  phi2_th.dotted = phif_1.dotted = phif_2.dotted = true;
  points.series = {phi2, phi2_th, phif, phif_1, phif_2};

  RunReport report;
  if (config.format != OutputFormat::Svg) {
    emit_csv(pairs, config.out_dir / "covariance_pairs.csv");
    report.files.push_back(config.out_dir / "covariance_pairs.csv");
    // Standard errors as plain columns in the CSV.
    SeriesCollection flat = points;
    flat.series.insert(flat.series.begin() + 1, Series{"phi2_se", phi2.error, {}});
    flat.series.insert(flat.series.begin() + 4, Series{"phi_f_se", phif.error, {}});
    emit_csv(flat, config.out_dir / "covariance_points.csv");
    report.files.push_back(config.out_dir / "covariance_points.csv");
  }
  if (config.format != OutputFormat::Csv) {
    emit_svg(points, config.out_dir / "covariance.svg");
    report.files.push_back(config.out_dir / "covariance.svg");
  }
  report.files.push_back(write_manifest(config, "covariance"));

  std::ostringstream s;
  s.precision(6);
  for (const auto& p : cov.pairs) {
    if (p.t1 > p.t2) continue;
    s << "<f f>(" << p.t1 << ", " << p.t2 << ") = " << p.ff.estimate << " +- " << p.ff.std_error
      << "  theory " << p.theory << '\n';
  }
  for (const auto& p : cov.points) {
    s << "<Phi^2>(" << p.t << ") = " << p.phi2.estimate << " +- " << p.phi2.std_error
      << "  theory " << p.phi2_theory << "; <Phi f> = " << p.phi_f.estimate << " +- "
      << p.phi_f.std_error << "  (D t^2 = " << p.phi_f_theory_dt2
      << ", 2 D t^2 = " << p.phi_f_theory_2dt2 << ")\n";
  }
  report.summary = s.str();
  return report;
}

RunReport run_classical(const ExperimentConfig& config) {
  prepare(config);
  const FieldModel field = config.make_field();
  ClassicalOptions opts;
  opts.record_stride = config.classical_stride;
  opts.parallel = parallel_of(config);

  SeriesCollection moments;
  moments.title = "Classical ensemble, " + field_label(config);
  moments.y_label = "<y^2/2> (dimensionless)";
  SeriesCollection rates;
  rates.x_name = "t_mid";
  rates.title = "Kinetic-energy rate, " + field_label(config);
  rates.y_label = "d<y^2/2>/dt (dimensionless)";
  SeriesCollection energy_plot = moments;

  std::ostringstream s;
  s.precision(6);
  for (double D : config.d_list) {
    const auto ens = simulate(field, config.noise(D), config.t_max, config.n_paths, opts);
    const auto m = moment_series(ens);
    if (moments.x.empty()) moments.x = m.times;
    const std::string tag = ":D=" + format_double(D);
    moments.series.push_back({"mean_x" + tag, m.mean_x, {}});
    moments.series.push_back({"se_x" + tag, m.se_x, {}});
    moments.series.push_back({"mean_y" + tag, m.mean_y, {}});
    moments.series.push_back({"var_y" + tag, m.var_y, {}});
    moments.series.push_back({"energy" + tag, m.mean_energy, {}});
    energy_plot.x = m.times;
    energy_plot.series.push_back({"energy" + tag, m.mean_energy, m.se_energy});

    if (ens.n >= 100) {
      const auto r = energy_rate_report(ens, field);
      if (rates.x.empty()) {
        for (const auto& row : r.rows) rates.x.push_back(row.t_mid);
      }
      Series emp{"rate" + tag, {}, {}}, se{"rate_se" + tag, {}, {}}, th{"theory" + tag, {}, {}};
      for (const auto& row : r.rows) {
        emp.values.push_back(row.empirical);
        se.values.push_back(row.std_error);
        th.values.push_back(row.theory);
      }
      rates.series.push_back(emp);
      rates.series.push_back(se);
      rates.series.push_back(th);
      s << "D = " << D << ": max energy-rate deviation " << r.max_deviation_se << " SE";
    } else {
      s << "D = " << D << ": energy-rate report skipped (n < 100)";
    }
    const auto fit = pumping_rate_fit(ens, 0.0, config.t_max);
    s << ", pumping rate " << fit.estimate << " +- " << fit.std_error << " (D = " << D << ")\n";

    const std::vector<double> probes{config.t_max / 4, config.t_max / 2, config.t_max};
    const auto cross = quantum_classical_crosscheck(field, config.noise(D), config.packet,
                                                    std::nullopt, probes, config.n_paths, opts);
    for (const auto& row : cross.rows) {
      s << "  t = " << row.t << ": classical <x> = " << row.classical_x << " +- "
        << row.classical_se << ", quantum center = " << row.quantum_center
        << (row.agree ? "  agree\n" : "  DISAGREE\n");
    }
  }

  RunReport report;
  if (config.format != OutputFormat::Svg) {
    emit_csv(moments, config.out_dir / "classical.csv");
    report.files.push_back(config.out_dir / "classical.csv");
    if (!rates.series.empty()) {
      emit_csv(rates, config.out_dir / "classical_rates.csv");
      report.files.push_back(config.out_dir / "classical_rates.csv");
    }
  }
  if (config.format != OutputFormat::Csv) {
    emit_svg(energy_plot, config.out_dir / "classical.svg");
    report.files.push_back(config.out_dir / "classical.svg");
  }
  report.files.push_back(write_manifest(config, "classical"));
  report.summary = s.str();
  return report;
}

double peak_abs(std::span<const double> values) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  return peak;
}

double half_max_width(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw UsageError("half_max_width needs matching series of length >= 2");
  }
  const double half = 0.5 * peak_abs(values);
  if (half == 0.0) return 0.0;
  double width = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = std::abs(values[i]) - half;
    const double b = std::abs(values[i + 1]) - half;
    const double h = times[i + 1] - times[i];
    if (a > 0.0 && b > 0.0) {
      width += h;
    } else if (a > 0.0 || b > 0.0) {
      // One end above: keep the part on the high side of the crossing.
      const double frac = (a > 0.0 ? a : b) / (std::abs(a) + std::abs(b));
      width += frac * h;
    }
  }
  return width;
}

std::vector<TimeWindow> windows_where_greater(std::span<const double> times,
                                              std::span<const double> a,
                                              std::span<const double> b, double floor) {
  if (times.size() != a.size() || times.size() != b.size()) {
    throw UsageError("windows_where_greater needs series of equal length");
  }
  std::vector<double> d(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double ma = std::abs(a[i]);
    const double mb = std::abs(b[i]);
    d[i] = (ma < floor && mb < floor) ? 0.0 : ma - mb;
  }
  std::vector<TimeWindow> out;
  bool open = false;
  TimeWindow current;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (d[i] > 0.0 && !open) {
      open = true;
      current.begin = times[i];
      if (i > 0 && d[i - 1] < 0.0) {
        current.begin = times[i - 1] + (times[i] - times[i - 1]) * (-d[i - 1]) / (d[i] - d[i - 1]);
      } else if (i > 0) {
        current.begin = times[i - 1];
      }
    } else if (d[i] <= 0.0 && open) {
      open = false;
      current.end = times[i];
      if (d[i] < 0.0) {
        current.end = times[i - 1] + (times[i] - times[i - 1]) * d[i - 1] / (d[i - 1] - d[i]);
      }
      out.push_back(current);
    }
  }
  if (open) {
    current.end = times.back();
    out.push_back(current);
  }
  return out;
}

}  // namespace wpflux
