#include <doctest.h>

#include <cmath>

#include "wpflux/classical.hpp"
#include "wpflux/errors.hpp"

using namespace wpflux;

namespace {

NoiseSpec noise(double D) {
  NoiseSpec s;
  s.D = D;
  s.dt = 0.01;
  return s;
}

}  // namespace

TEST_CASE("noiseless trajectories follow the field integrals") {
  const auto c = FieldModel::constant(0.3);
  const auto ens = simulate(c, noise(0.0), 20.0, 4);
  CHECK(ens.times.back() == doctest::Approx(20.0));
  for (std::size_t k = 0; k < ens.times.size(); ++k) {
    const double t = ens.times[k];
    for (std::size_t i = 0; i < ens.n; ++i) {
      CHECK(ens.y_at(i, k) == doctest::Approx(0.3 * t).epsilon(1e-12));
      CHECK(ens.x_at(i, k) == doctest::Approx(0.15 * t * t).epsilon(1e-12));
    }
  }
  const auto p = FieldModel::femto_pulse(0.1, 0.114);
  const auto pe = simulate(p, noise(0.0), 60.0, 1);
  for (std::size_t k = 0; k < pe.times.size(); k += 50) {
    CHECK(pe.y_at(0, k) == doctest::Approx(p.momentum_gain(pe.times[k])).epsilon(1e-9));
    CHECK(std::abs(pe.x_at(0, k) - p.displacement(pe.times[k])) < 1e-5);
  }
}

TEST_CASE("noise leaves the mean and heats the spread") {
  const double D = 0.05;
  const auto c = FieldModel::constant(0.3);
  const auto ens = simulate(c, noise(D), 30.0, 4000);
  const auto m = moment_series(ens);
  for (std::size_t k = 1; k < m.times.size(); k += 25) {
    const double t = m.times[k];
    CAPTURE(t);
    CHECK(std::abs(m.mean_x[k] - 0.15 * t * t) <= 4 * m.se_x[k]);
    CHECK(std::abs(m.mean_y[k] - 0.3 * t) <= 4 * m.se_y[k]);
    // Var of a sample variance: 2 sigma^4 / (n - 1).
    const double v = 2 * D * t;
    CHECK(std::abs(m.var_y[k] - v) <= 4 * v * std::sqrt(2.0 / (ens.n - 1)));
  }
  const auto rate = pumping_rate_fit(ens, 5.0, 30.0);
  CHECK(std::abs(rate.estimate - D) <= 3 * rate.std_error);
}

TEST_CASE("energy rates") {
  for (const auto& f : {FieldModel::zero(), FieldModel::constant(0.3)}) {
    const auto ens = simulate(f, noise(0.02), 20.0, 4000);
    const auto r = energy_rate_report(ens, f);
    CHECK(!r.rows.empty());
    CHECK(r.max_deviation_se < 4.5);
  }
  const auto tiny = simulate(FieldModel::zero(), noise(0.02), 5.0, 10);
  CHECK_THROWS_AS(energy_rate_report(tiny, FieldModel::zero()), UsageError);
}

TEST_CASE("classical and quantum centers agree") {
  const auto p = FieldModel::femto_pulse(0.1, 0.114);
  const std::vector<double> probes{10.0, 30.0, 50.0};
  const auto r = quantum_classical_crosscheck(p, noise(0.02), PacketSpec{}, std::nullopt, probes, 2000);
  CHECK(r.rows.size() == 3);
  CHECK(r.all_agree);
  const auto q = quantum_classical_crosscheck(p, noise(0.0), PacketSpec{}, std::nullopt, probes, 10);
  CHECK(q.all_agree);
}

TEST_CASE("trajectory streams are reproducible and worker independent") {
  ClassicalOptions one, many;
  one.parallel.workers = 1;
  many.parallel.workers = 3;
  const auto a = simulate(FieldModel::zero(), noise(0.05), 5.0, 64, one);
  const auto b = simulate(FieldModel::zero(), noise(0.05), 5.0, 64, many);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK_THROWS_AS(simulate(FieldModel::zero(), noise(0.05), 0.0, 4), UsageError);
}
