#include "wpflux/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "wpflux/errors.hpp"
#include "wpflux/output.hpp"

namespace wpflux {

std::string to_string(Route route) {
  switch (route) {
    case Route::Analytic: return "analytic";
    case Route::Averaged: return "averaged";
    case Route::MonteCarlo: return "mc";
    case Route::Tdse: return "tdse";
    case Route::Classical: return "classical";
  }
  return "?";
}

Route parse_route(const std::string& name) {
  for (Route r : {Route::Analytic, Route::Averaged, Route::MonteCarlo, Route::Tdse,
                  Route::Classical}) {
    if (to_string(r) == name) return r;
  }
  throw UsageError("routes: unknown route '" + name +
                   "' (expected analytic, averaged, mc, tdse, classical)");
}

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Svg: return "svg";
    case OutputFormat::Both: return "both";
  }
  return "?";
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "svg") return OutputFormat::Svg;
  if (name == "both") return OutputFormat::Both;
  throw UsageError("format: expected csv, svg or both, got '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw UsageError(key + ": expected a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  if (t.empty() || t[0] == '-') throw UsageError(key + ": expected a non-negative integer");
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (*end != '\0') throw UsageError(key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw UsageError(key + ": expected true or false, got '" + text + "'");
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

struct KeyHandler {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<KeyHandler>& key_table() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<KeyHandler> table = {
      {"field", [](C& c, S v) { c.field_kind = trim(v); }, [](const C& c) { return c.field_kind; }},
      {"field.E", [](C& c, S v) { c.field_E = parse_double(v, "field.E"); },
       [](const C& c) { return format_double(c.field_E); }},
      {"pulse.amplitude", [](C& c, S v) { c.pulse_amplitude = parse_double(v, "pulse.amplitude"); },
       [](const C& c) { return format_double(c.pulse_amplitude); }},
      {"pulse.omega", [](C& c, S v) { c.pulse_omega = parse_double(v, "pulse.omega"); },
       [](const C& c) { return format_double(c.pulse_omega); }},
      {"field.file", [](C& c, S v) { c.field_file = trim(v); },
       [](const C& c) { return c.field_file; }},
      {"sigma", [](C& c, S v) { c.packet.sigma = parse_double(v, "sigma"); },
       [](const C& c) { return format_double(c.packet.sigma); }},
      {"k0", [](C& c, S v) { c.packet.k0 = parse_double(v, "k0"); },
       [](const C& c) { return format_double(c.packet.k0); }},
      {"x_obs", [](C& c, S v) { c.x_obs = parse_double(v, "x_obs"); },
       [](const C& c) { return format_double(c.x_obs); }},
      {"t_max", [](C& c, S v) { c.t_max = parse_double(v, "t_max"); },
       [](const C& c) { return format_double(c.t_max); }},
      {"t_samples", [](C& c, S v) { c.t_samples = parse_unsigned(v, "t_samples"); },
       [](const C& c) { return std::to_string(c.t_samples); }},
      {"d_list", [](C& c, S v) { c.d_list = parse_double_list(v, "d_list"); },
       [](const C& c) { return join_doubles(c.d_list); }},
      {"D", [](C& c, S v) { c.noise_D = parse_double(v, "D"); },
       [](const C& c) { return format_double(c.noise_D); }},
      {"n_paths", [](C& c, S v) { c.n_paths = parse_unsigned(v, "n_paths"); },
       [](const C& c) { return std::to_string(c.n_paths); }},
      {"seed", [](C& c, S v) { c.seed = parse_unsigned(v, "seed"); },
       [](const C& c) { return std::to_string(c.seed); }},
      {"noise.dt", [](C& c, S v) { c.noise_dt = parse_double(v, "noise.dt"); },
       [](const C& c) { return format_double(c.noise_dt); }},
      {"noise.scheme",
       [](C& c, S v) {
         const auto t = trim(v);
         if (t == "trapezoid") {
           c.noise_scheme = PathScheme::Trapezoid;
         } else if (t == "exact") {
           c.noise_scheme = PathScheme::ExactJoint;
         } else {
           throw UsageError("noise.scheme: expected trapezoid or exact, got '" + t + "'");
         }
       },
       [](const C& c) {
         return std::string(c.noise_scheme == PathScheme::Trapezoid ? "trapezoid" : "exact");
       }},
      {"covariance.times",
       [](C& c, S v) { c.covariance_times = parse_double_list(v, "covariance.times"); },
       [](const C& c) { return join_doubles(c.covariance_times); }},
      {"drift_coefficient",
       [](C& c, S v) { c.drift_coefficient = parse_double(v, "drift_coefficient"); },
       [](const C& c) { return format_double(c.drift_coefficient); }},
      {"routes",
       [](C& c, S v) {
         c.routes.clear();
         std::istringstream in(v);
         std::string item;
         while (std::getline(in, item, ',')) {
           const auto name = trim(item);
           if (name.empty()) continue;
           const Route r = parse_route(name);
           if (std::find(c.routes.begin(), c.routes.end(), r) == c.routes.end()) {
             c.routes.push_back(r);
           }
         }
       },
       [](const C& c) {
         std::string out;
         for (std::size_t i = 0; i < c.routes.size(); ++i) {
           if (i) out += ',';
           out += to_string(c.routes[i]);
         }
         return out;
       }},
      {"out_dir", [](C& c, S v) { c.out_dir = trim(v); },
       [](const C& c) { return c.out_dir.string(); }},
      {"format", [](C& c, S v) { c.format = parse_format(trim(v)); },
       [](const C& c) { return to_string(c.format); }},
      {"tdse.x_min", [](C& c, S v) { c.tdse_grid.x_min = parse_double(v, "tdse.x_min"); },
       [](const C& c) { return format_double(c.tdse_grid.x_min); }},
      {"tdse.x_max", [](C& c, S v) { c.tdse_grid.x_max = parse_double(v, "tdse.x_max"); },
       [](const C& c) { return format_double(c.tdse_grid.x_max); }},
      {"tdse.n", [](C& c, S v) { c.tdse_grid.n = parse_unsigned(v, "tdse.n"); },
       [](const C& c) { return std::to_string(c.tdse_grid.n); }},
      {"tdse.dt", [](C& c, S v) { c.tdse_grid.dt = parse_double(v, "tdse.dt"); },
       [](const C& c) { return format_double(c.tdse_grid.dt); }},
      {"tdse.auto_domain", [](C& c, S v) { c.tdse_auto_domain = parse_bool(v, "tdse.auto_domain"); },
       [](const C& c) { return std::string(c.tdse_auto_domain ? "true" : "false"); }},
      {"classical.stride",
       [](C& c, S v) { c.classical_stride = parse_unsigned(v, "classical.stride"); },
       [](const C& c) { return std::to_string(c.classical_stride); }},
      {"validate.tdse", [](C& c, S v) { c.validate_tdse = parse_bool(v, "validate.tdse"); },
       [](const C& c) { return std::string(c.validate_tdse ? "true" : "false"); }},
      {"workers",
       [](C& c, S v) { c.workers = static_cast<unsigned>(parse_unsigned(v, "workers")); },
       [](const C& c) { return std::to_string(c.workers); }},
  };
  return table;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) throw UsageError(key + ": empty entry in '" + text + "'");
    out.push_back(parse_double(item, key));
  }
  if (out.empty()) throw UsageError(key + ": empty list");
  return out;
}

ExperimentConfig ExperimentConfig::defaults_for(const std::string& command) {
  ExperimentConfig c;
  if (command == "figure2") {
    c.field_kind = "femto";
  } else if (command == "flux") {
    c.routes = {Route::Analytic};
    c.d_list = {0.0};
  } else if (command == "classical") {
    c.field_kind = "zero";
    c.routes = {Route::Classical};
    c.d_list = {0.0, 0.05};
    c.t_max = 50.0;
  } else if (command == "validate") {
    c.d_list = {0.0, 0.005, 0.01, 0.02};
  }
  return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& h : key_table()) {
    if (key == h.key) {
      h.set(*this, value);
      return;
    }
  }
  throw UsageError("unknown config key '" + key + "'");
}

void ExperimentConfig::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    try {
      set(key, trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void ExperimentConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  merge_text(buf.str(), path.string());
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& h : key_table()) {
    out += h.key;
    out += " = ";
    out += h.get(*this);
    out += '\n';
  }
  return out;
}

void ExperimentConfig::validate() const {
  static const char* kinds[] = {"zero", "constant", "femto", "tabulated"};
  if (std::find(std::begin(kinds), std::end(kinds), field_kind) == std::end(kinds)) {
    throw UsageError("field: expected zero, constant, femto or tabulated, got '" + field_kind + "'");
  }
  if (field_kind == "femto" && !(pulse_omega > 0.0)) throw UsageError("pulse.omega: must be > 0");
  if (field_kind == "tabulated" && field_file.empty()) {
    throw UsageError("field.file: required for a tabulated field");
  }
  if (!(packet.sigma > 0.0)) throw UsageError("sigma: must be > 0");
  if (!(t_max > 0.0)) throw UsageError("t_max: must be > 0");
  if (t_samples < 2) throw UsageError("t_samples: must be >= 2");
  for (double d : d_list) {
    if (!(d >= 0.0)) throw UsageError("d_list: noise intensities must be >= 0");
  }
  if (!(noise_D >= 0.0)) throw UsageError("D: must be >= 0");
  if (!(noise_dt > 0.0)) throw UsageError("noise.dt: must be > 0");
  if (n_paths < 2) throw UsageError("n_paths: must be >= 2");
  if (routes.empty()) throw UsageError("routes: at least one route is required");
  for (double t : covariance_times) {
    if (!(t > 0.0)) throw UsageError("covariance.times: must be > 0");
  }
  try {
    tdse_grid.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("tdse: ") + e.what());
  }
}

FieldModel ExperimentConfig::make_field() const {
  if (field_kind == "zero") return FieldModel::zero();
  if (field_kind == "constant") return FieldModel::constant(field_E);
  if (field_kind == "femto") {
    return FieldModel::femto_pulse(pulse_amplitude, pulse_omega,
                                   std::max(FieldModel::kDefaultHorizon, t_max + 1.0));
  }
  if (field_kind == "tabulated") return FieldModel::load_tabulated(field_file);
  throw UsageError("field: unknown kind '" + field_kind + "'");
}

NoiseSpec ExperimentConfig::noise(double D) const {
  NoiseSpec spec;
  spec.D = D;
  spec.dt = noise_dt;
  spec.seed = seed;
  spec.scheme = noise_scheme;
  return spec;
}

std::vector<double> ExperimentConfig::time_grid() const { return uniform_grid(0.0, t_max, t_samples); }

bool ExperimentConfig::has_route(Route route) const {
  return std::find(routes.begin(), routes.end(), route) != routes.end();
}

}  // namespace wpflux
