// Acceptance suite: one PASS/FAIL line per criterion, supplementary
// measurements indented underneath. Exit status 1 if any criterion fails.

#include <chrono>
#include <iostream>
#include <vector>

#include "wpflux/validation.hpp"

using namespace wpflux;

namespace {

bool report(const std::vector<CheckResult>& results, double seconds) {
  bool ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& c = results[i];
    if (i == 0) {
      std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << c.criterion << " - " << c.name
                << ": " << c.detail << " [" << static_cast<int>(seconds + 0.5) << " s]\n";
      ok = c.passed;
    } else {
      const char* status = c.informational ? "info" : (c.passed ? "pass" : "fail");
      std::cout << "     " << status << ": " << c.name << ": " << c.detail << '\n';
    }
  }
  std::cout.flush();
  return ok;
}

template <class Fn>
bool run(Fn fn, const ValidationOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<CheckResult> results;
  if constexpr (std::is_same_v<decltype(fn(options)), CheckResult>) {
    results.push_back(fn(options));
  } else {
    results = fn(options);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report(results, seconds);
}

}  // namespace

int main() {
  const ValidationOptions options;
  int failed = 0;
  failed += !run(check_d0_reduction, options);
  failed += !run(check_tdse_oracle, options);
  failed += !run(check_averaged_vs_mc, options);
  failed += !run(check_noise_covariance, options);
  failed += !run(check_figure1, options);
  failed += !run(check_figure2, options);
  failed += !run(check_furutsu_novikov, options);
  failed += !run(check_continuity, options);
  failed += !run(check_zero_flux_locus, options);
  failed += !run(check_plane_wave, options);
  std::cout << (10 - failed) << "/10 criteria passed\n";
  return failed == 0 ? 0 : 1;
}
