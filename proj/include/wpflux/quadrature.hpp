#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace wpflux {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

struct SimpsonOptions {
  double rel_tol = 1e-10;
  std::size_t initial_panels = 16;  // must be even
  int max_halvings = 22;
};

/// Composite Simpson rule on [a, b], halving the step until two successive
/// estimates agree to rel_tol. The tolerance is taken relative to the
/// integral of |fn| so integrals that cancel to ~0 still converge.
/// Throws NumericalError (with the last two estimates) on non-convergence.
QuadratureResult simpson_to_tolerance(const std::function<double(double)>& fn, double a, double b,
                                      const SimpsonOptions& options = {});

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace wpflux
