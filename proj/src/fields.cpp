#include "wpflux/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wpflux/errors.hpp"
#include "wpflux/output.hpp"
#include "wpflux/quadrature.hpp"

namespace wpflux {

namespace detail {

// Node values of f and Phi on t_i = i * h, i = 0..nodes-1.
struct IntegralCache {
  double h = 0.0;
  std::vector<double> f;
  std::vector<double> phi;

  double horizon() const { return h * static_cast<double>(f.size() - 1); }
};

}  // namespace detail

namespace {

double pulse_value(const FemtoPulse& p, double t) {
  const double phase = p.omega * t;
  const double s = phase / (2.0 * std::numbers::pi) - 1.0;
  const double s2 = s * s;
  return p.amplitude * std::exp(-5.0 * s2 * s2) * std::sin(phase);
}

std::shared_ptr<const detail::IntegralCache> build_pulse_cache(const FemtoPulse& p, double horizon,
                                                               double h) {
  auto cache = std::make_shared<detail::IntegralCache>();
  const auto panels = static_cast<std::size_t>(std::ceil(horizon / h));
  cache->h = h;
  cache->f.resize(panels + 1);
  cache->phi.resize(panels + 1);
  cache->f[0] = 0.0;
  cache->phi[0] = 0.0;

  CompensatedSum f_sum;
  CompensatedSum phi_sum;
  double e_a = pulse_value(p, 0.0);
  for (std::size_t i = 0; i < panels; ++i) {
    const double t_a = h * static_cast<double>(i);
    const double t_b = h * static_cast<double>(i + 1);
    const double e_m = pulse_value(p, 0.5 * (t_a + t_b));
    const double e_b = pulse_value(p, t_b);
    const double w = t_b - t_a;
    // int_{t_a}^{t_b} f = w f(t_a) + int (t_b - u) E(u) du
    phi_sum.add(w * f_sum.value() + w * w / 6.0 * (e_a + 2.0 * e_m));
    f_sum.add(w / 6.0 * (e_a + 4.0 * e_m + e_b));
    cache->f[i + 1] = f_sum.value();
    cache->phi[i + 1] = phi_sum.value();
    e_a = e_b;
  }
  return cache;
}

// Exact integrals of the linear interpolant, stored in a cache laid out on
// the tabulated (possibly nonuniform) grid.
std::shared_ptr<const detail::IntegralCache> build_tabulated_cache(const TabulatedField& tab) {
  auto cache = std::make_shared<detail::IntegralCache>();
  const std::size_t n = tab.times.size();
  cache->f.resize(n);
  cache->phi.resize(n);
  cache->f[0] = 0.0;
  cache->phi[0] = 0.0;
  CompensatedSum f_sum;
  CompensatedSum phi_sum;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double w = tab.times[i + 1] - tab.times[i];
    const double e0 = tab.values[i];
    const double e1 = tab.values[i + 1];
    phi_sum.add(w * f_sum.value() + w * w * (e0 / 3.0 + e1 / 6.0));
    f_sum.add(0.5 * w * (e0 + e1));
    cache->f[i + 1] = f_sum.value();
    cache->phi[i + 1] = phi_sum.value();
  }
  return cache;
}

void require_nonnegative(double t, const char* what) {
  if (!(t >= 0.0)) {
    std::ostringstream msg;
    msg << what << " requires t >= 0 (got " << t << ")";
    throw DomainError(msg.str());
  }
}

std::size_t tabulated_segment(const TabulatedField& tab, double t) {
  if (t > tab.times.back()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t = " << t << " is past the last tabulated node " << tab.times.back();
    throw RangeError(msg.str());
  }
  const auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(tab.times.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, tab.times.size() - 2);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

FieldModel::FieldModel() : params_(ZeroField{}) {}

FieldModel::FieldModel(FieldParams params) : params_(std::move(params)) {}

FieldModel FieldModel::zero() { return FieldModel(ZeroField{}); }

FieldModel FieldModel::constant(double E) {
  if (!std::isfinite(E)) throw UsageError("constant field must be finite");
  return FieldModel(ConstantField{E});
}

FieldModel FieldModel::femto_pulse(double amplitude, double omega, double horizon,
                                   double node_spacing) {
  if (!(omega > 0.0)) throw UsageError("pulse frequency omega must be > 0");
  if (!std::isfinite(amplitude)) throw UsageError("pulse amplitude must be finite");
  if (!(horizon > 0.0) || !(node_spacing > 0.0)) {
    throw UsageError("pulse cache horizon and node spacing must be > 0");
  }
  FemtoPulse p{amplitude, omega};
  FieldModel model(p);
  model.cache_ = build_pulse_cache(p, horizon, node_spacing);
  return model;
}

FieldModel FieldModel::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size()) {
    throw UsageError("tabulated field: times and values differ in length");
  }
  if (times.size() < 2) throw UsageError("tabulated field needs at least two nodes");
  if (times.front() != 0.0) throw UsageError("tabulated field grid must start at t = 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      throw UsageError("tabulated field contains non-finite entries");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw UsageError("tabulated field grid must be strictly increasing");
    }
  }
  TabulatedField tab{std::move(times), std::move(values)};
  FieldModel model(tab);
  model.cache_ = build_tabulated_cache(std::get<TabulatedField>(model.params_));
  return model;
}

FieldModel FieldModel::load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field table " + path.string());
  std::vector<double> times;
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double t = 0.0;
    double e = 0.0;
    if (!(fields >> t)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    std::string extra;
    if (!(fields >> e) || (fields >> extra)) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) +
                       ": expected exactly two columns (time, field)");
    }
    times.push_back(t);
    values.push_back(e);
  }
  return tabulated(std::move(times), std::move(values));
}

std::string FieldModel::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const ZeroField&) { out << "zero"; },
                 [&](const ConstantField& c) { out << "constant(E=" << format_double(c.E) << ")"; },
                 [&](const FemtoPulse& p) {
                   out << "femto(E0=" << format_double(p.amplitude)
                       << ", omega=" << format_double(p.omega) << ")";
                 },
                 [&](const TabulatedField& tab) {
                   out << "tabulated(" << tab.times.size()
                       << " nodes, t_max=" << format_double(tab.times.back()) << ")";
                 },
             },
             params_);
  return out.str();
}

double FieldModel::max_time() const {
  if (const auto* tab = std::get_if<TabulatedField>(&params_)) return tab->times.back();
  return INFINITY;
}

double FieldModel::field_at(double t) const {
  return std::visit(Overloaded{
                        [&](const ZeroField&) {
                          require_nonnegative(t, "field_at");
                          return 0.0;
                        },
                        [&](const ConstantField& c) {
                          require_nonnegative(t, "field_at");
                          return c.E;
                        },
                        [&](const FemtoPulse& p) {
                          require_nonnegative(t, "field_at");
                          return pulse_value(p, t);
                        },
                        [&](const TabulatedField& tab) {
                          if (t < 0.0) return 0.0;
                          const std::size_t i = tabulated_segment(tab, t);
                          const double w = tab.times[i + 1] - tab.times[i];
                          const double u = (t - tab.times[i]) / w;
                          return tab.values[i] + u * (tab.values[i + 1] - tab.values[i]);
                        },
                    },
                    params_);
}

double FieldModel::momentum_gain(double t) const {
  return std::visit(
      Overloaded{
          [&](const ZeroField&) {
            require_nonnegative(t, "momentum_gain");
            return 0.0;
          },
          [&](const ConstantField& c) {
            require_nonnegative(t, "momentum_gain");
            return c.E * t;
          },
          [&](const FemtoPulse& p) {
            require_nonnegative(t, "momentum_gain");
            const auto& cache = *cache_;
            if (t >= cache.horizon()) {
              const auto tail = simpson_to_tolerance([&](double u) { return pulse_value(p, u); },
                                                     cache.horizon(), t);
              return cache.f.back() + tail.value;
            }
            const auto i = std::min(static_cast<std::size_t>(t / cache.h), cache.f.size() - 2);
            const double t_i = cache.h * static_cast<double>(i);
            const double w = t - t_i;
            return cache.f[i] + w / 6.0 *
                                    (pulse_value(p, t_i) + 4.0 * pulse_value(p, t_i + 0.5 * w) +
                                     pulse_value(p, t));
          },
          [&](const TabulatedField& tab) {
            if (t <= 0.0) return 0.0;
            const std::size_t i = tabulated_segment(tab, t);
            const double w = tab.times[i + 1] - tab.times[i];
            const double tau = t - tab.times[i];
            const double slope = (tab.values[i + 1] - tab.values[i]) / w;
            return cache_->f[i] + tau * (tab.values[i] + 0.5 * slope * tau);
          },
      },
      params_);
}

double FieldModel::displacement(double t) const {
  return std::visit(
      Overloaded{
          [&](const ZeroField&) {
            require_nonnegative(t, "displacement");
            return 0.0;
          },
          [&](const ConstantField& c) {
            require_nonnegative(t, "displacement");
            return 0.5 * c.E * t * t;
          },
          [&](const FemtoPulse& p) {
            require_nonnegative(t, "displacement");
            const auto& cache = *cache_;
            const double horizon = cache.horizon();
            if (t >= horizon) {
              const auto tail = simpson_to_tolerance(
                  [&](double u) { return (t - u) * pulse_value(p, u); }, horizon, t);
              return cache.phi.back() + cache.f.back() * (t - horizon) + tail.value;
            }
            // Cubic Hermite on [t_i, t_i+1] with Phi' = f.
            const auto i = std::min(static_cast<std::size_t>(t / cache.h), cache.f.size() - 2);
            const double h = cache.h;
            const double s = (t - h * static_cast<double>(i)) / h;
            const double s2 = s * s;
            const double s3 = s2 * s;
            return (2.0 * s3 - 3.0 * s2 + 1.0) * cache.phi[i] + (s3 - 2.0 * s2 + s) * h * cache.f[i] +
                   (-2.0 * s3 + 3.0 * s2) * cache.phi[i + 1] + (s3 - s2) * h * cache.f[i + 1];
          },
          [&](const TabulatedField& tab) {
            if (t <= 0.0) return 0.0;
            const std::size_t i = tabulated_segment(tab, t);
            const double w = tab.times[i + 1] - tab.times[i];
            const double tau = t - tab.times[i];
            const double slope = (tab.values[i + 1] - tab.values[i]) / w;
            return cache_->phi[i] + cache_->f[i] * tau +
                   tau * tau * (0.5 * tab.values[i] + slope * tau / 6.0);
          },
      },
      params_);
}

double field_at(const FieldModel& model, double t) { return model.field_at(t); }
double momentum_gain(const FieldModel& model, double t) { return model.momentum_gain(t); }
double displacement(const FieldModel& model, double t) { return model.displacement(t); }

}  // namespace wpflux
