#include "wpflux/units.hpp"

#include <string>

#include "wpflux/errors.hpp"

namespace wpflux {

UnitSystem::UnitSystem(double x0, double hbar, double mass, double charge)
    : x0_(x0), hbar_(hbar), mass_(mass), charge_(charge) {
  if (!(x0 > 0.0) || !(hbar > 0.0) || !(mass > 0.0) || !(charge > 0.0)) {
    throw UsageError("unit system scales must be strictly positive");
  }
  tau0_ = x0_ * x0_ * mass_ / hbar_;
  E0_ = hbar_ / (charge_ * x0_ * tau0_);
}

UnitSystem UnitSystem::si(double x0_meters) {
  return UnitSystem(x0_meters, si::hbar, si::electron_mass, si::elementary_charge);
}

UnitSystem UnitSystem::atomic(double x0_bohr) { return UnitSystem(x0_bohr, 1.0, 1.0, 1.0); }

double UnitSystem::scale(QuantityKind kind) const {
  switch (kind) {
    case QuantityKind::Length:
      return x0_;
    case QuantityKind::Time:
      return tau0_;
    case QuantityKind::Field:
      return E0_;
    case QuantityKind::Flux:
      return 1.0 / tau0_;
  }
  throw UsageError("unknown quantity kind");
}

double UnitSystem::convert(QuantityKind kind, double value, Direction direction) const {
  const double s = scale(kind);
  return direction == Direction::ToPhysical ? value * s : value / s;
}

QuantityKind parse_quantity_kind(const char* name) {
  const std::string n(name);
  if (n == "length") return QuantityKind::Length;
  if (n == "time") return QuantityKind::Time;
  if (n == "field") return QuantityKind::Field;
  if (n == "flux") return QuantityKind::Flux;
  throw UsageError("unknown quantity kind '" + n + "' (expected length, time, field or flux)");
}

}  // namespace wpflux
