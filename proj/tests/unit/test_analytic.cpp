#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "wpflux/analytic.hpp"
#include "wpflux/errors.hpp"

using namespace wpflux;

namespace {

const PacketSpec unit{1.0, 0.0};

const FieldModel& pulse() {
  static const FieldModel p = FieldModel::femto_pulse(0.1, 0.114);
  return p;
}

std::vector<FieldModel> all_fields() {
  return {FieldModel::zero(), FieldModel::constant(0.3), FieldModel::constant(-1.1), pulse(),
          FieldModel::tabulated({0, 10, 20, 40, 120}, {0, 0.2, -0.1, 0.05, 0.0})};
}

}  // namespace

TEST_CASE("psi_momentum") {
  const auto zero = FieldModel::zero();
  SUBCASE("zero field is a pure phase") {
    for (double k : {-2.0, 0.0, 0.7}) {
      for (double t : {0.0, 3.0, 25.0}) {
        const auto psi = psi_momentum(k, t, unit, zero);
        const auto expect =
            initial_momentum_amplitude(k, 1.0) * std::exp(std::complex<double>(0, -k * k * t / 2));
        CHECK(std::abs(psi - expect) < 1e-12);
      }
    }
  }
  SUBCASE("t = 0 gives the initial amplitude for any field") {
    for (const auto& f : all_fields()) {
      CHECK(psi_momentum(0.4, 0.0, PacketSpec{1.7, 0}, f) ==
            std::complex<double>(initial_momentum_amplitude(0.4, 1.7), 0.0));
    }
  }
  SUBCASE("constant field phase against the polynomial integral") {
    const double E = 0.3, k = 1.0, t = 2.0;
    const double integral = k * k * t - k * E * t * t + E * E * t * t * t / 3.0;
    const auto psi = psi_momentum(k, t, unit, FieldModel::constant(E));
    const auto expect = initial_momentum_amplitude(k - E * t, 1.0) *
                        std::exp(std::complex<double>(0, -0.5 * integral));
    CHECK(std::abs(psi - expect) < 1e-12);
  }
  SUBCASE("modulus is transported along the characteristics") {
    for (const auto& f : all_fields()) {
      for (double t : {5.0, 37.0, 90.0}) {
        for (double k : {-1.0, 0.0, 0.6}) {
          const double shifted = k + f.momentum_gain(t);
          CHECK(std::abs(psi_momentum(shifted, t, unit, f)) ==
                doctest::Approx(initial_momentum_amplitude(k, 1.0)).epsilon(1e-13));
        }
      }
    }
  }
  SUBCASE("initial amplitude is normalized: int dk/2pi |phi0|^2 = 1") {
    double s = 0.0;
    const double h = 1e-3;
    for (double k = -20.0; k <= 20.0; k += h) {
      s += std::pow(initial_momentum_amplitude(k, 0.8), 2) * h;
    }
    CHECK(s / (2 * std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(psi_momentum(0.0, -1.0, unit, zero), DomainError);
}

TEST_CASE("plane_wave_flux") {
  CHECK(plane_wave_flux(2.0, 13.0, FieldModel::zero()) == 2.0);
  for (const auto& f : all_fields()) CHECK(plane_wave_flux(0.75, 0.0, f) == 0.75);
  CHECK(plane_wave_flux(1.0, 10.0, FieldModel::constant(0.3)) == doctest::Approx(4.0));
  // The field enters only through f: the difference is k0 up to one rounding.
  for (const auto& f : all_fields()) {
    for (double t : {1.0, 30.0, 99.0}) {
      const double k0 = 0.37;
      const double diff = plane_wave_flux(k0, t, f) - plane_wave_flux(0.0, t, f);
      CHECK(std::abs(diff - k0) <= 0x1p-52 * (std::abs(k0) + std::abs(f.momentum_gain(t))));
    }
  }
}

TEST_CASE("gaussian_density") {
  CHECK(gaussian_density(0.0, 0.0, unit, FieldModel::zero()) ==
        doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-15));
  for (double x : {0.3, 4.0, 17.0}) {
    CHECK(gaussian_density(x, 6.0, unit, FieldModel::zero()) ==
          gaussian_density(-x, 6.0, unit, FieldModel::zero()));
  }
  const auto c = FieldModel::constant(0.3);
  CHECK(gaussian_density(3.75, 5.0, unit, c) ==
        doctest::Approx(1.0 / std::sqrt(26.0 * std::numbers::pi)).epsilon(1e-14));
}

// The window [-200, 200] cannot hold the packet at late times (its center is
// at 0.15 t^2), so the integral runs over the packet's own +-12 widths.
TEST_CASE("density stays normalized") {
  const auto c = FieldModel::constant(0.3);
  for (double t : {0.0, 1.0, 10.0, 50.0, 100.0}) {
    const double w = std::sqrt(spread_width_squared(t, 1.0));
    const double center = c.displacement(t);
    const int n = 20000;
    const double a = center - 12 * w, b = center + 12 * w, h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      s += (i == 0 || i == n ? 0.5 : 1.0) * gaussian_density(a + i * h, t, unit, c);
    }
    CAPTURE(t);
    CHECK(std::abs(s * h - 1.0) < 1e-8);
  }
}

TEST_CASE("gaussian_flux") {
  const auto zero = FieldModel::zero();
  for (double t : {0.0, 0.5, 4.0, 70.0}) CHECK(gaussian_flux(0.0, t, unit, zero) == 0.0);
  for (double x : {0.5, 3.0, 11.0}) {
    CHECK(gaussian_flux(-x, 7.0, unit, zero) == -gaussian_flux(x, 7.0, unit, zero));
  }
  for (const auto& f : all_fields()) CHECK(gaussian_flux(2.0, 0.0, PacketSpec{0.7, 0}, f) == 0.0);
  // Outward spreading of a free packet: flux points away from the origin.
  CHECK(gaussian_flux(3.0, 2.0, unit, zero) > 0.0);
}

TEST_CASE("continuity of the closed forms") {
  const double h = 1e-4;
  for (const auto& f : all_fields()) {
    for (double sigma : {0.6, 1.0, 2.5}) {
      const PacketSpec p{sigma, 0.0};
      for (double t : {0.7, 5.0, 31.0, 88.0}) {
        for (double x : {-12.0, 0.0, 3.0, 20.0, 150.0}) {
          const double drho =
              (gaussian_density(x, t + h, p, f) - gaussian_density(x, t - h, p, f)) / (2 * h);
          const double dj = (gaussian_flux(x + h, t, p, f) - gaussian_flux(x - h, t, p, f)) / (2 * h);
          CHECK(std::abs(drho + dj) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("zero_flux_point") {
  CHECK(zero_flux_point(2.0, unit, FieldModel::constant(0.3)) == doctest::Approx(-0.9).epsilon(1e-15));
  CHECK(zero_flux_point(9.0, unit, FieldModel::zero()) == 0.0);
  const double x0 = zero_flux_point(40.0, unit, pulse());
  CHECK(std::abs(gaussian_flux(x0, 40.0, unit, pulse())) < 1e-12);
  for (const auto& f : all_fields()) {
    for (double sigma : {0.5, 1.0, 3.0}) {
      for (double t : {0.1, 2.0, 45.0, 100.0}) {
        const PacketSpec p{sigma, 0};
        CHECK(std::abs(gaussian_flux(zero_flux_point(t, p, f), t, p, f)) < 1e-12);
      }
    }
  }
  // General sigma: x0 = Phi - f (sigma^4 + t^2) / t.
  const auto c = FieldModel::constant(0.5);
  const double s = 1.7, t = 3.0;
  CHECK(zero_flux_point(t, PacketSpec{s, 0}, c) ==
        doctest::Approx(0.25 * t * t - 0.5 * t * (std::pow(s, 4) + t * t) / t).epsilon(1e-14));
  CHECK_THROWS_AS(zero_flux_point(0.0, unit, c), DomainError);
}

TEST_CASE("averaged_flux") {
  const auto c = FieldModel::constant(0.3);
  SUBCASE("D = 0 reduces to the deterministic flux bit for bit") {
    for (const auto& f : all_fields()) {
      for (double t : {0.0, 0.3, 12.0, 99.0}) {
        for (double x : {-5.0, 0.0, 20.0}) {
          CHECK(averaged_flux(x, t, unit, f, 0.0) == gaussian_flux(x, t, unit, f));
        }
      }
    }
  }
  SUBCASE("peak amplitude decreases with the noise intensity") {
    const auto times = uniform_grid(0.0, 100.0, 400);
    double previous = INFINITY;
    for (double D : {0.0, 0.01, 0.05}) {
      double peak = 0.0;
      for (double v : averaged_flux_series(20.0, times, unit, c, D).values) {
        peak = std::max(peak, std::abs(v));
      }
      CHECK(peak < previous);
      previous = peak;
    }
  }
  SUBCASE("drift coefficient enters as c D t^2") {
    const double D = 0.01, t = 10.0, x = 20.0;
    const double S = 1.0 + 4.0 * D * t * t * t / 3.0 + t * t;
    const double u = x - c.displacement(t);
    const double rho = std::exp(-u * u / S) / std::sqrt(std::numbers::pi * S);
    for (double coef : {1.0, 2.0, 10.0}) {
      const double expect = rho * (c.momentum_gain(t) + u / S * (t + coef * D * t * t));
      CHECK(averaged_flux(x, t, unit, c, D, DriftModel{coef}) ==
            doctest::Approx(expect).epsilon(1e-13));
    }
  }
  SUBCASE("averaged density keeps its center and its mass") {
    const double D = 0.02, t = 30.0;
    const double center = c.displacement(t);
    double m0 = 0, m1 = 0;
    const double h = 0.05;
    for (double x = center - 600; x <= center + 600; x += h) {
      const double r = averaged_density(x, t, unit, c, D);
      m0 += r * h;
      m1 += r * (x - center) * h;
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(m1) < 1e-8);
  }
  CHECK_THROWS_AS(averaged_flux(0.0, 1.0, unit, c, -0.1), DomainError);
}

TEST_CASE("flux series validation") {
  FluxSeries s;
  s.times = {0.0, 1.0};
  s.values = {0.0};
  CHECK_THROWS_AS(s.validate(), UsageError);
  s.values = {0.0, 1.0};
  s.std_error = {0.1, -0.1};
  CHECK_THROWS_AS(s.validate(), UsageError);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), UsageError);
  CHECK_THROWS_AS(PacketSpec({0.0, 0.0}).validate(), UsageError);
  const auto g = uniform_grid(0.0, 100.0, 400);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 100.0);
}
