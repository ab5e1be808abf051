#pragma once

namespace wpflux {

enum class QuantityKind { Length, Time, Field, Flux };
enum class Direction { ToDimensionless, ToPhysical };

/// Scales between physical and dimensionless variables. Only the length
/// scale x0 is free: tau0 follows from x0^2 / tau0 = hbar / m and
/// E0 = hbar / (e x0 tau0).
///
/// Physical values are expressed in whatever system hbar, m and e are given
/// in: SI for UnitSystem::si(), Hartree atomic units for atomic().
///
/// Flux convention: the 1D probability current is a probability per unit
/// time, so j_physical = j / tau0.
class UnitSystem {
 public:
  /// x0 in meters; electron mass and elementary charge.
  static UnitSystem si(double x0_meters);
  /// x0 in bohr radii; hbar = m_e = e = 1.
  static UnitSystem atomic(double x0_bohr = 1.0);

  double x0() const { return x0_; }
  double tau0() const { return tau0_; }
  double E0() const { return E0_; }
  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double charge() const { return charge_; }

  double scale(QuantityKind kind) const;
  double convert(QuantityKind kind, double value, Direction direction) const;

 private:
  UnitSystem(double x0, double hbar, double mass, double charge);

  double x0_;
  double tau0_;
  double E0_;
  double hbar_;
  double mass_;
  double charge_;
};

/// Parses "length", "time", "field", "flux"; throws UsageError otherwise.
QuantityKind parse_quantity_kind(const char* name);

namespace si {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double electron_mass = 9.1093837015e-31;
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double bohr_radius = 5.29177210903e-11;
}  // namespace si

}  // namespace wpflux
