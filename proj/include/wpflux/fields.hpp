#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace wpflux {

struct ZeroField {};

struct ConstantField {
  double E = 0.0;
};

/// E(t) = amplitude * exp(-5 (omega t / 2 pi - 1)^4) * sin(omega t)
struct FemtoPulse {
  double amplitude = 0.1;
  double omega = 0.114;
};

/// Piecewise-linear field on a grid starting at t = 0. Zero before t = 0,
/// undefined (RangeError) past the last node.
struct TabulatedField {
  std::vector<double> times;
  std::vector<double> values;
};

using FieldParams = std::variant<ZeroField, ConstantField, FemtoPulse, TabulatedField>;

namespace detail {
struct IntegralCache;
}

/// Deterministic electric field E(t) together with its running integrals
///   f(t)   = int_0^t E(t') dt'    (momentum gained from the field)
///   Phi(t) = int_0^t f(t') dt'    (displacement of the packet center)
///
/// Zero and Constant use closed forms. FemtoPulse integrates E on a dense
/// node grid (spacing 1e-3 by default) at construction with composite
/// Simpson panels; between nodes f is finished with one Simpson panel and
/// Phi by cubic Hermite interpolation (Phi' = f at the nodes). Past the cache
/// horizon both fall back to step-halving Simpson. Tabulated integrates the
/// linear interpolant exactly (trapezoidal on its own grid).
///
/// Immutable after construction; the cache is shared between copies, so a
/// FieldModel can be read from any number of threads.
class FieldModel {
 public:
  static constexpr double kDefaultHorizon = 400.0;
  static constexpr double kDefaultNodeSpacing = 1e-3;

  FieldModel();  // Zero

  static FieldModel zero();
  static FieldModel constant(double E);
  static FieldModel femto_pulse(double amplitude, double omega,
                                double horizon = kDefaultHorizon,
                                double node_spacing = kDefaultNodeSpacing);
  static FieldModel tabulated(std::vector<double> times, std::vector<double> values);
  /// Two whitespace-separated columns (t, E); '#' starts a comment.
  static FieldModel load_tabulated(const std::filesystem::path& path);

  const FieldParams& params() const { return params_; }
  std::string describe() const;

  double field_at(double t) const;
  double momentum_gain(double t) const;
  double displacement(double t) const;

  /// Largest t for which every operation is defined (infinite unless tabulated).
  double max_time() const;

 private:
  explicit FieldModel(FieldParams params);

  FieldParams params_;
  std::shared_ptr<const detail::IntegralCache> cache_;
};

double field_at(const FieldModel& model, double t);
double momentum_gain(const FieldModel& model, double t);
double displacement(const FieldModel& model, double t);

}  // namespace wpflux
