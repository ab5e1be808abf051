#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wpflux/errors.hpp"
#include "wpflux/fields.hpp"
#include "wpflux/quadrature.hpp"
#include "wpflux/units.hpp"

using namespace wpflux;

namespace {

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

const FieldModel& pulse() {
  static const FieldModel p = FieldModel::femto_pulse(0.1, 0.114);
  return p;
}

}  // namespace

TEST_CASE("field_at examples") {
  CHECK(FieldModel::constant(0.3).field_at(12.5) == 0.3);
  CHECK(pulse().field_at(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  const double period = 2.0 * std::numbers::pi / 0.114;
  CHECK(std::abs(pulse().field_at(period)) < 1e-15);
  // Envelope is one at the period: E = 0.1 sin(omega t) nearby.
  const double t = period + 1.0;
  const double env = std::exp(-5.0 * std::pow(0.114 * t / (2 * std::numbers::pi) - 1.0, 4));
  CHECK(pulse().field_at(t) == doctest::Approx(0.1 * env * std::sin(0.114 * t)).epsilon(1e-14));
  CHECK_THROWS_AS(pulse().field_at(-1.0), DomainError);
}

TEST_CASE("closed forms for zero and constant fields") {
  CHECK(FieldModel::zero().momentum_gain(7.0) == 0.0);
  CHECK(FieldModel::zero().displacement(7.0) == 0.0);
  CHECK(FieldModel::constant(0.3).momentum_gain(10.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(FieldModel::constant(0.3).displacement(10.0) == doctest::Approx(15.0).epsilon(1e-15));
}

TEST_CASE("constant closed forms agree with quadrature") {
  const auto c = FieldModel::constant(0.3);
  for (double t : {0.5, 3.0, 10.0, 77.0}) {
    const auto f = simpson_to_tolerance([&](double s) { return c.field_at(s); }, 0.0, t);
    const auto phi = simpson_to_tolerance([&](double s) { return c.momentum_gain(s); }, 0.0, t);
    CHECK(close_rel(f.value, c.momentum_gain(t), 1e-10));
    CHECK(close_rel(phi.value, c.displacement(t), 1e-10));
  }
}

// Reference values from 30-digit mpmath quadrature.
TEST_CASE("pulse integrals match the high-precision oracle") {
  struct Row {
    double t, f, phi;
  };
  const Row rows[] = {
      {55.116, -1.2540426992095441951, -6.8373457958205933121},
      {40.0, -0.25185837893908652558, 6.4843873060372374553},
      {100.0, 0.030270760890749562215, -13.745432798718731185},
      {10.0, 0.027978451518378411675, 0.064857875468597450142},
      {2.0, 0.0002463270046858350971, 0.00014680722933585259533},
  };
  for (const auto& r : rows) {
    CAPTURE(r.t);
    CHECK(close_rel(pulse().momentum_gain(r.t), r.f, 1e-10));
    CHECK(close_rel(pulse().displacement(r.t), r.phi, 1e-10));
  }
}

TEST_CASE("pulse integrals past the cache horizon fall back to quadrature") {
  const auto short_cache = FieldModel::femto_pulse(0.1, 0.114, 60.0);
  for (double t : {59.9, 60.0, 80.0, 100.0}) {
    CAPTURE(t);
    CHECK(close_rel(short_cache.momentum_gain(t), pulse().momentum_gain(t), 1e-9));
    CHECK(close_rel(short_cache.displacement(t), pulse().displacement(t), 1e-9));
  }
}

TEST_CASE("derivative relations converge at second order") {
  const FieldModel models[] = {FieldModel::constant(0.3), pulse(),
                               FieldModel::tabulated({0, 1, 2, 3, 4, 5, 6},
                                                     {0, 0.2, 0.1, -0.3, 0.0, 0.4, 0.1})};
  for (const auto& m : models) {
    for (double t : {2.5, 17.3, 40.0}) {
      if (t + 1e-3 > m.max_time()) continue;
      CAPTURE(m.describe());
      CAPTURE(t);
      auto err = [&](double h, auto g, auto dg) {
        return std::abs((g(t + h) - g(t - h)) / (2 * h) - dg(t));
      };
      auto phi = [&](double s) { return m.displacement(s); };
      auto f = [&](double s) { return m.momentum_gain(s); };
      auto e = [&](double s) { return m.field_at(s); };
      CHECK(err(1e-4, phi, f) < 1e-8);
      // Step sizes large enough for truncation to dominate rounding.
      const double e1 = err(1e-2, phi, f);
      const double e2 = err(1e-3, phi, f);
      if (e1 > 1e-9) CHECK(e1 / e2 > 50.0);
      // The tabulated field is only piecewise linear; its f is C1 away from nodes.
      CHECK(err(1e-4, f, e) < 1e-7);
    }
  }
}

TEST_CASE("tabulated fields") {
  const auto tab = FieldModel::tabulated({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
  CHECK(tab.field_at(0.5) == doctest::Approx(1.0));
  CHECK(tab.field_at(2.0) == doctest::Approx(1.0));
  CHECK(tab.field_at(-1.0) == 0.0);
  CHECK(tab.momentum_gain(1.0) == doctest::Approx(1.0));
  CHECK(tab.momentum_gain(3.0) == doctest::Approx(3.0));
  // Phi(1) = int_0^1 t^2 dt = 1/3.
  CHECK(tab.displacement(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(tab.field_at(3.5), RangeError);
  CHECK_THROWS_AS(tab.displacement(3.5), RangeError);
  CHECK_THROWS_AS(FieldModel::tabulated({0.0, 2.0, 1.0}, {0, 0, 0}), UsageError);
  CHECK_THROWS_AS(FieldModel::tabulated({0.5, 1.0}, {0, 0}), UsageError);
  CHECK_THROWS_AS(FieldModel::femto_pulse(0.1, 0.0), UsageError);
}

TEST_CASE("tabulated fields load from text") {
  const auto path = std::filesystem::temp_directory_path() / "wpflux_field_test.txt";
  {
    std::ofstream out(path);
    out << "# t E\n0 0\n1 2   # peak\n\n3 0\n";
  }
  const auto tab = FieldModel::load_tabulated(path);
  CHECK(tab.momentum_gain(3.0) == doctest::Approx(3.0));
  std::filesystem::remove(path);
  CHECK_THROWS(FieldModel::load_tabulated(path));
}

TEST_CASE("pulse models are safe to share between threads") {
  const auto copy = pulse();
  CHECK(copy.displacement(33.0) == pulse().displacement(33.0));
}

TEST_CASE("unit conversion") {
  const auto si2 = UnitSystem::si(2.0);
  CHECK(si2.convert(QuantityKind::Length, 2.0, Direction::ToDimensionless) == doctest::Approx(1.0));
  const auto au = UnitSystem::atomic();
  CHECK(au.tau0() == doctest::Approx(1.0));
  CHECK(au.convert(QuantityKind::Field, 1.0, Direction::ToPhysical) == doctest::Approx(1.0));
  // x0^2 / tau0 = hbar / m.
  const auto si = UnitSystem::si(si::bohr_radius);
  CHECK(si.x0() * si.x0() / si.tau0() ==
        doctest::Approx(si::hbar / si::electron_mass).epsilon(1e-14));
  for (auto kind : {QuantityKind::Length, QuantityKind::Time, QuantityKind::Field,
                    QuantityKind::Flux}) {
    for (double v : {1e-20, 0.37, 12345.0}) {
      const double there = si.convert(kind, v, Direction::ToDimensionless);
      const double back = si.convert(kind, there, Direction::ToPhysical);
      CHECK(std::abs(back - v) <= 4e-16 * v);
    }
  }
  CHECK(parse_quantity_kind("flux") == QuantityKind::Flux);
  CHECK_THROWS_AS(parse_quantity_kind("mass"), UsageError);
}

TEST_CASE("quadrature reports non-convergence") {
  SimpsonOptions opts;
  opts.max_halvings = 2;
  CHECK_THROWS_AS(simpson_to_tolerance([](double x) { return std::sin(1000 * x * x); }, 0, 10, opts),
                  NumericalError);
  const auto r = simpson_to_tolerance([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}
