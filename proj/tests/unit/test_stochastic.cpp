#include <doctest.h>

#include <cmath>

#include "wpflux/errors.hpp"
#include "wpflux/stochastic.hpp"

using namespace wpflux;

namespace {

const PacketSpec unit{1.0, 0.0};

NoiseSpec noise(double D, std::uint64_t seed = 42, PathScheme scheme = PathScheme::Trapezoid) {
  NoiseSpec s;
  s.D = D;
  s.seed = seed;
  s.scheme = scheme;
  return s;
}

}  // namespace

TEST_CASE("noiseless paths vanish") {
  const auto p = sample_path(noise(0.0), 10.0, 3);
  CHECK(p.times.size() == 201);
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    CHECK(p.f_tilde[i] == 0.0);
    CHECK(p.phi_tilde[i] == 0.0);
  }
}

TEST_CASE("path structure and reproducibility") {
  const auto a = sample_path(noise(0.05), 10.0, 7);
  const auto b = sample_path(noise(0.05), 10.0, 7);
  const auto c = sample_path(noise(0.05), 10.0, 8);
  CHECK(a.f_tilde[0] == 0.0);
  CHECK(a.phi_tilde[0] == 0.0);
  CHECK(a.f_tilde.size() == a.times.size());
  CHECK(a.phi_tilde.size() == a.times.size());
  CHECK(a.times.back() == doctest::Approx(10.0));
  CHECK(a.f_tilde == b.f_tilde);
  CHECK(a.phi_tilde == b.phi_tilde);
  CHECK(a.f_tilde != c.f_tilde);
  // Trapezoid rule on the nodes.
  for (std::size_t i = 1; i < a.times.size(); ++i) {
    CHECK(a.phi_tilde[i] - a.phi_tilde[i - 1] ==
          doctest::Approx(0.5 * a.dt * (a.f_tilde[i] + a.f_tilde[i - 1])).epsilon(1e-12));
  }
  // Interpolants are consistent with the nodes and with eta_hat.
  CHECK(a.f_at(a.times[17]) == a.f_tilde[17]);
  CHECK(a.phi_at(a.times[17]) == doctest::Approx(a.phi_tilde[17]).epsilon(1e-14));
  const double t = 3.013;
  const double h = 1e-6;
  CHECK((a.phi_at(t + h) - a.phi_at(t - h)) / (2 * h) == doctest::Approx(a.f_at(t)).epsilon(1e-7));
  CHECK((a.f_at(t + h) - a.f_at(t - h)) / (2 * h) == doctest::Approx(a.eta_hat(t)).epsilon(1e-6));
  CHECK_THROWS_AS(a.f_at(10.5), RangeError);
  CHECK_THROWS_AS(a.phi_at(-0.1), RangeError);
}

TEST_CASE("f~ statistics over 1e4 paths") {
  const double D = 0.05;
  const int n = 10000;
  double m = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double f = sample_path(noise(D), 10.0, i).f_at(10.0);
    m += f;
    m2 += f * f;
  }
  m /= n;
  const double var = m2 / n - m * m;
  CHECK(std::abs(m) < 3.0 * std::sqrt(2 * D * 10.0 / n));
  CHECK(std::abs(var - 1.0) < 3.0 * 1.0 * std::sqrt(2.0 / n));
}

TEST_CASE("covariance report examples") {
  const std::vector<double> times{3.0, 4.0, 6.0, 7.0};
  for (auto scheme : {PathScheme::Trapezoid, PathScheme::ExactJoint}) {
    const auto rep = covariance_report(noise(0.05, 42, scheme), times, 10000);
    CHECK(rep.pairs.size() == 16);
    CHECK(rep.points.size() == 4);
    for (const auto& p : rep.pairs) {
      if (p.t1 == 3.0 && p.t2 == 7.0) {
        CHECK(p.theory == doctest::Approx(0.3));
        CHECK(std::abs(p.ff.estimate - 0.3) <= 3 * p.ff.std_error);
      }
    }
    for (const auto& p : rep.points) {
      if (p.t == 6.0) {
        CHECK(p.phi2_theory == doctest::Approx(7.2));
        CHECK(std::abs(p.phi2.estimate - 7.2) <= 3 * p.phi2.std_error);
      }
      if (p.t == 4.0) {
        CHECK(p.phi_f_theory_dt2 == doctest::Approx(0.8));
        CHECK(p.phi_f_theory_2dt2 == doctest::Approx(1.6));
        // The cross moment selects D t^2.
        CHECK(std::abs(p.phi_f.estimate - 0.8) <= 3 * p.phi_f.std_error);
        CHECK(std::abs(p.phi_f.estimate - 1.6) > 10 * p.phi_f.std_error);
      }
    }
  }
  CHECK_THROWS_AS(covariance_report(noise(0.05), times, 50), UsageError);
}

TEST_CASE("variance growth laws") {
  std::vector<double> times;
  for (int i = 0; i < 30; ++i) times.push_back(std::pow(50.0, i / 29.0));
  const double D = 0.05;
  const auto g = variance_growth(noise(D), times, 10000);
  CHECK(std::abs(g.brownian_slope.estimate - 2 * D) <= 3 * g.brownian_slope.std_error);
  CHECK(std::abs(g.phi_exponent - 3.0) <= 0.1);
}

TEST_CASE("realization flux") {
  const auto c = FieldModel::constant(0.3);
  const auto times = uniform_grid(0.0, 30.0, 61);
  SUBCASE("noiseless path reproduces the closed form") {
    const auto r = realization_flux(20.0, times, unit, c, sample_path(noise(0.0), 30.0, 0));
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(r.values[i] == gaussian_flux(20.0, times[i], unit, c));
    }
  }
  SUBCASE("noise breaks the mirror symmetry of the free packet") {
    const auto r = realization_flux(0.0, times, unit, FieldModel::zero(),
                                    sample_path(noise(0.05), 30.0, 1));
    double biggest = 0.0;
    for (double v : r.values) biggest = std::max(biggest, std::abs(v));
    CHECK(biggest > 1e-3);
  }
  SUBCASE("golden path") {
    // Path 0 of seed 42, D = 0.01 (libstdc++ normal_distribution).
    const std::vector<double> t{5.0, 10.0, 12.5, 15.0, 20.0};
    const double expect[] = {1.7703701286567273e-05, 0.17442363513250972, 0.14327854565286324,
                             0.03999234798706771, 0.0010935238385830657};
    const auto path = sample_path(noise(0.01), 100.0, 0);
    const auto r = realization_flux(20.0, t, unit, c, path);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(r.values[i] == doctest::Approx(expect[i]).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(realization_flux(20.0, times, unit, c, sample_path(noise(0.01), 10.0, 0)),
                  RangeError);
}

TEST_CASE("ensemble flux") {
  const auto c = FieldModel::constant(0.3);
  const auto times = uniform_grid(0.0, 40.0, 81);
  SUBCASE("noiseless ensemble equals the closed form with zero error") {
    const auto e = ensemble_flux(20.0, times, unit, c, noise(0.0), 64);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(e.values[i] == gaussian_flux(20.0, times[i], unit, c));
      CHECK(e.std_error[i] == 0.0);
    }
  }
  SUBCASE("result does not depend on the worker count") {
    ParallelOptions one, many;
    one.workers = 1;
    many.workers = 5;
    const auto a = ensemble_flux(20.0, times, unit, c, noise(0.01), 1000, one);
    const auto b = ensemble_flux(20.0, times, unit, c, noise(0.01), 1000, many);
    CHECK(a.values == b.values);
    CHECK(a.std_error == b.std_error);
  }
  SUBCASE("standard error falls as 1/sqrt(n)") {
    auto rms_se = [&](std::size_t n) {
      const auto e = ensemble_flux(20.0, times, unit, c, noise(0.01), n);
      double s = 0;
      int k = 0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 6.0 || times[i] > 25.0) continue;
        s += e.std_error[i] * e.std_error[i];
        ++k;
      }
      return std::sqrt(s / k);
    };
    const double s2 = rms_se(100), s3 = rms_se(1000), s4 = rms_se(10000);
    CHECK(std::abs(s2 / s3 / std::sqrt(10.0) - 1.0) < 0.2);
    CHECK(std::abs(s3 / s4 / std::sqrt(10.0) - 1.0) < 0.2);
  }
  SUBCASE("halving the path step moves the mean by less than one standard error") {
    const std::size_t n = 4000;
    NoiseSpec fine = noise(0.01);
    fine.dt = 0.025;
    const auto e_fine = ensemble_flux(20.0, times, unit, c, fine, n);
    const auto e_coarse = ensemble_flux_from(
        20.0, times, unit, c, n,
        [&](std::size_t i) { return coarsen_path(sample_path(fine, 40.0, i), 2); });
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (e_fine.std_error[i] == 0.0) continue;
      CAPTURE(times[i]);
      CHECK(std::abs(e_fine.values[i] - e_coarse.values[i]) < e_fine.std_error[i]);
    }
  }
  SUBCASE("closed-form average sits inside the band while the ensemble resolves it") {
    // Up to t = 30 the dominant noise paths lie within 3 sd of typical.
    const auto t = uniform_grid(0.0, 30.0, 121);
    const auto e = ensemble_flux(20.0, t, unit, c, noise(0.01), 10000);
    const auto a = averaged_flux_series(20.0, t, unit, c, 0.01);
    int outside = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      outside += std::abs(e.values[i] - a.values[i]) > 3 * e.std_error[i] + 1e-15;
    }
    CHECK(outside <= 1);
  }
}

TEST_CASE("pulse ensemble shows early enhancement") {
  const auto p = FieldModel::femto_pulse(0.1, 0.114);
  const auto times = uniform_grid(0.0, 40.0, 161);
  const auto base = gaussian_flux_series(20.0, times, unit, p);
  for (double D : {0.005, 0.02}) {
    const auto e = ensemble_flux(20.0, times, unit, p, noise(D), 10000);
    bool enhanced = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] > 25.0) break;
      enhanced = enhanced ||
                 std::abs(e.values[i]) - std::abs(base.values[i]) > 3 * e.std_error[i];
    }
    CAPTURE(D);
    CHECK(enhanced);
  }
}
