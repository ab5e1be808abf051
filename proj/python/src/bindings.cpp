#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <span>

#include "wpflux/analytic.hpp"
#include "wpflux/classical.hpp"
#include "wpflux/config.hpp"
#include "wpflux/errors.hpp"
#include "wpflux/experiments.hpp"
#include "wpflux/fields.hpp"
#include "wpflux/stochastic.hpp"
#include "wpflux/tdse.hpp"
#include "wpflux/validation.hpp"

namespace py = pybind11;
using namespace wpflux;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw UsageError("expected a one-dimensional array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

Array to_array(const std::vector<double>& v) { return Array(v.size(), v.data()); }

py::dict series_dict(const FluxSeries& s) {
  py::dict d;
  d["t"] = to_array(s.times);
  d["j"] = to_array(s.values);
  if (!s.std_error.empty()) d["std_error"] = to_array(s.std_error);
  return d;
}

NoiseSpec make_noise(double D, std::uint64_t seed, double dt, const std::string& scheme) {
  NoiseSpec s;
  s.D = D;
  s.seed = seed;
  s.dt = dt;
  if (scheme == "trapezoid") {
    s.scheme = PathScheme::Trapezoid;
  } else if (scheme == "exact") {
    s.scheme = PathScheme::ExactJoint;
  } else {
    throw UsageError("scheme must be 'trapezoid' or 'exact'");
  }
  s.validate();
  return s;
}

ExperimentConfig make_config(const std::string& command, const py::dict& settings) {
  auto c = ExperimentConfig::defaults_for(command);
  for (const auto& [key, value] : settings) {
    c.set(py::str(key), py::str(value));
  }
  return c;
}

py::dict report_dict(const RunReport& r) {
  py::dict d;
  py::list files;
  for (const auto& f : r.files) files.append(f.string());
  d["files"] = files;
  d["summary"] = r.summary;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wpflux, m) {
  m.doc() = "Probability flux of a Gaussian wave packet under a field plus white noise";
  m.attr("__version__") = WPFLUX_VERSION;

  auto base = py::register_exception<Error>(m, "WpfluxError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<PacketSpec>(m, "Packet")
      .def(py::init([](double sigma, double k0) {
             PacketSpec p{sigma, k0};
             p.validate();
             return p;
           }),
           py::arg("sigma") = 1.0, py::arg("k0") = 0.0)
      .def_readonly("sigma", &PacketSpec::sigma)
      .def_readonly("k0", &PacketSpec::k0)
      .def("__repr__", [](const PacketSpec& p) {
        return "Packet(sigma=" + py::repr(py::float_(p.sigma)).cast<std::string>() +
               ", k0=" + py::repr(py::float_(p.k0)).cast<std::string>() + ")";
      });

  py::class_<FieldModel>(m, "Field")
      .def_static("zero", &FieldModel::zero)
      .def_static("constant", &FieldModel::constant, py::arg("E"))
      .def_static("femto_pulse",
                  [](double a, double w, double horizon) {
                    return FieldModel::femto_pulse(a, w, horizon);
                  },
                  py::arg("amplitude") = 0.1,
                  py::arg("omega") = 0.114, py::arg("horizon") = FieldModel::kDefaultHorizon)
      .def_static("tabulated",
                  [](const Array& t, const Array& e) {
                    const auto a = view(t), b = view(e);
                    return FieldModel::tabulated({a.begin(), a.end()}, {b.begin(), b.end()});
                  },
                  py::arg("t"), py::arg("E"))
      .def_static("load", &FieldModel::load_tabulated, py::arg("path"))
      .def("field_at",
           [](const FieldModel& f, const Array& t) {
             return py::vectorize([&](double s) { return f.field_at(s); })(t);
           },
           py::arg("t"))
      .def("momentum_gain",
           [](const FieldModel& f, const Array& t) {
             return py::vectorize([&](double s) { return f.momentum_gain(s); })(t);
           },
           py::arg("t"))
      .def("displacement",
           [](const FieldModel& f, const Array& t) {
             return py::vectorize([&](double s) { return f.displacement(s); })(t);
           },
           py::arg("t"))
      .def_property_readonly("max_time", &FieldModel::max_time)
      .def("__repr__", &FieldModel::describe);

  m.def(
      "gaussian_density",
      [](const Array& x, const Array& t, const PacketSpec& p, const FieldModel& f) {
        return py::vectorize([&](double xx, double tt) { return gaussian_density(xx, tt, p, f); })(x, t);
      },
      py::arg("x"), py::arg("t"), py::arg("packet"), py::arg("field"));
  m.def(
      "gaussian_flux",
      [](const Array& x, const Array& t, const PacketSpec& p, const FieldModel& f) {
        return py::vectorize([&](double xx, double tt) { return gaussian_flux(xx, tt, p, f); })(x, t);
      },
      py::arg("x"), py::arg("t"), py::arg("packet"), py::arg("field"),
      "Deterministic flux j(x, t) of the driven Gaussian packet.");
  m.def(
      "averaged_flux",
      [](const Array& x, const Array& t, const PacketSpec& p, const FieldModel& f, double D,
         double c) {
        return py::vectorize([&](double xx, double tt) {
          return averaged_flux(xx, tt, p, f, D, DriftModel{c});
        })(x, t);
      },
      py::arg("x"), py::arg("t"), py::arg("packet"), py::arg("field"), py::arg("D"),
      py::arg("drift_coefficient") = 2.0, "Closed-form noise-averaged flux.");
  m.def("zero_flux_point", &zero_flux_point, py::arg("t"), py::arg("packet"), py::arg("field"));
  m.def("plane_wave_flux", &plane_wave_flux, py::arg("k0"), py::arg("t"), py::arg("field"));

  m.def(
      "ensemble_flux",
      [](double x, const Array& times, const PacketSpec& p, const FieldModel& f, double D,
         std::size_t n_paths, std::uint64_t seed, double dt, const std::string& scheme,
         unsigned workers) {
        ParallelOptions par;
        par.workers = workers;
        const auto s = ensemble_flux(x, view(times), p, f, make_noise(D, seed, dt, scheme),
                                     n_paths, par);
        return series_dict(s);
      },
      py::arg("x"), py::arg("times"), py::arg("packet"), py::arg("field"), py::arg("D"),
      py::arg("n_paths") = 10000, py::arg("seed") = 42, py::arg("dt") = 0.05,
      py::arg("scheme") = "trapezoid", py::arg("workers") = 0,
      "Monte Carlo noise-averaged flux with standard errors.");

  m.def(
      "sample_path",
      [](double D, double t_max, std::uint64_t index, std::uint64_t seed, double dt,
         const std::string& scheme) {
        const auto path = sample_path(make_noise(D, seed, dt, scheme), t_max, index);
        py::dict d;
        d["t"] = to_array(path.times);
        d["f"] = to_array(path.f_tilde);
        d["phi"] = to_array(path.phi_tilde);
        return d;
      },
      py::arg("D"), py::arg("t_max"), py::arg("index") = 0, py::arg("seed") = 42,
      py::arg("dt") = 0.05, py::arg("scheme") = "trapezoid");

  m.def(
      "tdse_flux",
      [](double x, const Array& times, const PacketSpec& p, const FieldModel& f, double x_min,
         double x_max, std::size_t n, double dt, bool auto_domain) {
        TdseOptions opts;
        opts.base_grid.x_min = x_min;
        opts.base_grid.x_max = x_max;
        opts.base_grid.n = n;
        opts.base_grid.dt = dt;
        opts.auto_domain = auto_domain;
        TdseRun run;
        {
          py::gil_scoped_release release;
          run = tdse_flux_series(x, view(times), p, f, opts);
        }
        auto d = series_dict(run.flux);
        d["grid"] = py::make_tuple(run.grid.x_min, run.grid.x_max, run.grid.n, run.grid.dt);
        return d;
      },
      py::arg("x"), py::arg("times"), py::arg("packet"), py::arg("field"),
      py::arg("x_min") = -400.0, py::arg("x_max") = 600.0, py::arg("n") = 16384,
      py::arg("dt") = 5e-3, py::arg("auto_domain") = true,
      "Flux from a split-operator integration of the Schroedinger equation.");

  m.def(
      "classical_moments",
      [](const FieldModel& f, double D, double t_max, std::size_t n, std::uint64_t seed,
         double dt, std::size_t stride) {
        ClassicalOptions opts;
        opts.record_stride = stride;
        const auto ens = simulate(f, make_noise(D, seed, dt, "trapezoid"), t_max, n, opts);
        const auto mo = moment_series(ens);
        py::dict d;
        d["t"] = to_array(mo.times);
        d["mean_x"] = to_array(mo.mean_x);
        d["se_x"] = to_array(mo.se_x);
        d["mean_y"] = to_array(mo.mean_y);
        d["var_y"] = to_array(mo.var_y);
        d["mean_energy"] = to_array(mo.mean_energy);
        return d;
      },
      py::arg("field"), py::arg("D"), py::arg("t_max"), py::arg("n") = 10000,
      py::arg("seed") = 42, py::arg("dt") = 0.05, py::arg("stride") = 10);

  m.def(
      "run",
      [](const std::string& command, const py::dict& settings) {
        const auto c = make_config(command, settings);
        if (command == "figure1") return report_dict(run_figure1(c));
        if (command == "figure2") return report_dict(run_figure2(c));
        if (command == "flux") return report_dict(run_flux(c));
        if (command == "covariance") return report_dict(run_covariance(c));
        if (command == "classical") return report_dict(run_classical(c));
        throw UsageError("unknown command '" + command + "'");
      },
      py::arg("command"), py::arg("settings") = py::dict(),
      "Runs a CLI experiment; settings are config keys mapped to values.");

  m.def(
      "validate",
      [](const py::dict& settings) {
        const auto c = make_config("validate", settings);
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = run_validation(ValidationOptions::from_config(c));
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["criterion"] = r.criterion;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["informational"] = r.informational;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("settings") = py::dict());
}
