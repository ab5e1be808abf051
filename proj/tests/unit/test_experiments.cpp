#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wpflux/errors.hpp"
#include "wpflux/experiments.hpp"

using namespace wpflux;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wpflux_exp_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const Series& column(const SeriesCollection& c, const std::string& name) {
  for (const auto& s : c.series) {
    if (s.name == name) return s;
  }
  FAIL("missing column " << name);
  return c.series.front();
}

}  // namespace

TEST_CASE("flux table layout") {
  auto c = ExperimentConfig::defaults_for("figure1");
  c.routes = {Route::Analytic, Route::Averaged, Route::MonteCarlo};
  c.n_paths = 200;
  c.t_samples = 101;
  c.t_max = 40.0;
  const auto t = flux_table(c, false);
  CHECK(t.data.series.size() == 3 * c.d_list.size());
  REQUIRE(t.std_error);
  CHECK(t.std_error->series.size() == c.d_list.size());
  CHECK(column_name(Route::Averaged, 0.01) == "averaged:D=0.01");
  // Noise-free columns coincide.
  CHECK(column(t.data, "averaged:D=0").values == column(t.data, "analytic:D=0").values);
  CHECK(column(t.data, "mc:D=0").values == column(t.data, "analytic:D=0").values);
  CHECK(column(t.data, "analytic:D=0.02").values == column(t.data, "analytic:D=0").values);
  const auto with_field = flux_table(c, true);
  CHECK(with_field.data.series.size() == 3 * c.d_list.size() + 1);
  CHECK(with_field.data.series.back().name == "field");
  CHECK(with_field.data.series.back().secondary_axis);
  c.routes = {Route::Classical};
  CHECK_THROWS_AS(flux_table(c, false), UsageError);
}

TEST_CASE("curve metrics") {
  const std::vector<double> t{0, 1, 2, 3, 4};
  const std::vector<double> j{0, 1, 2, 1, 0};
  CHECK(peak_abs(std::vector<double>{-3, 2}) == 3.0);
  // |j| > 1 on (1, 3) exactly.
  CHECK(half_max_width(t, j) == doctest::Approx(2.0));
  const std::vector<double> a{0, 2, 2, 0, 0};
  const std::vector<double> b{1, 1, 1, 1, 1};
  const auto w = windows_where_greater(t, a, b);
  REQUIRE(w.size() == 1);
  CHECK(w[0].begin == doctest::Approx(0.5));
  CHECK(w[0].end == doctest::Approx(2.5));
  CHECK(windows_where_greater(t, b, b).empty());
}

TEST_CASE("figure runs write data and a reproducible manifest") {
  const auto dir = scratch("fig");
  auto c = ExperimentConfig::defaults_for("figure1");
  c.routes = {Route::Averaged, Route::MonteCarlo};
  c.n_paths = 100;
  c.t_samples = 60;
  c.out_dir = dir;
  const auto r = run_figure1(c);
  for (const char* f : {"figure1.csv", "figure1.svg", "figure1_stderr.csv", "figure1.manifest.txt"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(r.summary.find("averaged:D=0.02") != std::string::npos);
  const auto manifest = slurp(dir / "figure1.manifest.txt");
  CHECK(manifest.rfind("# wpflux run manifest", 0) == 0);
  CHECK(manifest.find("# seed: 42") != std::string::npos);
  auto again = ExperimentConfig::defaults_for("figure1");
  again.merge_file(dir / "figure1.manifest.txt");
  const auto dir2 = scratch("fig2");
  again.out_dir = dir2;
  run_figure1(again);
  CHECK(slurp(dir / "figure1.csv") == slurp(dir2 / "figure1.csv"));
  CHECK(slurp(dir / "figure1_stderr.csv") == slurp(dir2 / "figure1_stderr.csv"));
  const auto back = read_csv(dir / "figure1.csv");
  CHECK(back.series.size() == 8);
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("figure2 and covariance and classical runners") {
  const auto dir = scratch("other");
  auto c2 = ExperimentConfig::defaults_for("figure2");
  c2.out_dir = dir;
  c2.format = OutputFormat::Csv;
  const auto r2 = run_figure2(c2);
  CHECK(r2.summary.find("exceeds D=0 on:") != std::string::npos);
  CHECK(!std::filesystem::exists(dir / "figure2.svg"));
  CHECK(read_csv(dir / "figure2.csv").series.back().name == "field");

  auto cv = ExperimentConfig::defaults_for("covariance");
  cv.out_dir = dir;
  cv.n_paths = 500;
  run_covariance(cv);
  CHECK(std::filesystem::exists(dir / "covariance_pairs.csv"));
  CHECK(std::filesystem::exists(dir / "covariance.svg"));

  auto cl = ExperimentConfig::defaults_for("classical");
  cl.out_dir = dir;
  cl.n_paths = 400;
  const auto rc = run_classical(cl);
  CHECK(std::filesystem::exists(dir / "classical.csv"));
  CHECK(std::filesystem::exists(dir / "classical_rates.csv"));
  CHECK(!rc.summary.empty());
  std::filesystem::remove_all(dir);
}
