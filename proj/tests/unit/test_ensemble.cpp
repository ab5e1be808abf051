#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "wpflux/ensemble.hpp"

using namespace wpflux;

TEST_CASE("moment accumulator matches two-pass statistics") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(3.0, 2.0);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = normal(rng);
  MomentAccumulator a(1), b(1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    (i < 377 ? a : b).add(std::span<const double>(&xs[i], 1));
  }
  a.merge(b);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= xs.size() - 1;
  const auto s = a.stats();
  CHECK(s.n == 1000);
  CHECK(s.mean[0] == doctest::Approx(mean).epsilon(1e-13));
  CHECK(s.std_error[0] == doctest::Approx(std::sqrt(var / 1000)).epsilon(1e-12));
}

TEST_CASE("ensemble reduction is bit-identical for any worker count") {
  auto sample = [](std::size_t i, std::span<double> out) {
    std::mt19937_64 rng(derive_stream_seed(99, i));
    std::normal_distribution<double> normal;
    for (auto& v : out) v = normal(rng) * 1e3 + 1e-3 * static_cast<double>(i);
  };
  EnsembleStats reference;
  for (unsigned workers : {1u, 2u, 3u, 8u}) {
    ParallelOptions opts;
    opts.workers = workers;
    const auto s = ensemble_moments(1001, 5, sample, opts);
    if (workers == 1) {
      reference = s;
      continue;
    }
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(s.mean[k] == reference.mean[k]);
      CHECK(s.std_error[k] == reference.std_error[k]);
    }
  }
}

TEST_CASE("stream seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_stream_seed(42, i));
  CHECK(seen.size() == 10000);
  CHECK(derive_stream_seed(42, 5) == derive_stream_seed(42, 5));
  CHECK(derive_stream_seed(42, 5) != derive_stream_seed(43, 5));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(5000, 0);
  ParallelOptions opts;
  opts.workers = 4;
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, opts);
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("line fit") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{1, 3, 5, 7, 9};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_std_error == doctest::Approx(0.0));
  const auto m = mean_with_std_error(std::vector<double>{1, 2, 3, 4});
  CHECK(m.mean == 2.5);
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}
