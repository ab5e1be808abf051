#include "wpflux/quadrature.hpp"

#include <sstream>

#include "wpflux/errors.hpp"

namespace wpflux {

namespace {

struct SimpsonLevel {
  double value;
  double abs_value;
};

// Simpson sums are rebuilt from the cached odd/even node sums so each halving
// only evaluates the new midpoints.
class SimpsonRefiner {
 public:
  SimpsonRefiner(const std::function<double(double)>& fn, double a, double b, std::size_t panels)
      : fn_(fn), a_(a), b_(b), panels_(panels) {
    const double h = (b_ - a_) / static_cast<double>(panels_);
    const double fa = fn_(a_);
    const double fb = fn_(b_);
    ends_ = fa + fb;
    ends_abs_ = std::abs(fa) + std::abs(fb);
    for (std::size_t i = 1; i < panels_; ++i) {
      const double v = fn_(a_ + h * static_cast<double>(i));
      if (i % 2 == 1) {
        odd_ += v;
        odd_abs_ += std::abs(v);
      } else {
        even_ += v;
        even_abs_ += std::abs(v);
      }
    }
  }

  SimpsonLevel current() const {
    const double h = (b_ - a_) / static_cast<double>(panels_);
    return {h / 3.0 * (ends_ + 4.0 * odd_ + 2.0 * even_),
            h / 3.0 * (ends_abs_ + 4.0 * odd_abs_ + 2.0 * even_abs_)};
  }

  void halve() {
    const std::size_t fine = panels_ * 2;
    const double h = (b_ - a_) / static_cast<double>(fine);
    even_ += odd_;
    even_abs_ += odd_abs_;
    odd_ = 0.0;
    odd_abs_ = 0.0;
    for (std::size_t i = 1; i < fine; i += 2) {
      const double v = fn_(a_ + h * static_cast<double>(i));
      odd_ += v;
      odd_abs_ += std::abs(v);
    }
    panels_ = fine;
  }

  std::size_t panels() const { return panels_; }

 private:
  const std::function<double(double)>& fn_;
  double a_;
  double b_;
  std::size_t panels_;
  double ends_ = 0.0, ends_abs_ = 0.0;
  double odd_ = 0.0, odd_abs_ = 0.0;
  double even_ = 0.0, even_abs_ = 0.0;
};

}  // namespace

QuadratureResult simpson_to_tolerance(const std::function<double(double)>& fn, double a, double b,
                                      const SimpsonOptions& options) {
  if (a == b) return {0.0, 0.0, 0};
  std::size_t panels = options.initial_panels < 2 ? 2 : options.initial_panels;
  if (panels % 2 == 1) ++panels;

  SimpsonRefiner refiner(fn, a, b, panels);
  SimpsonLevel previous = refiner.current();
  for (int level = 0; level < options.max_halvings; ++level) {
    refiner.halve();
    const SimpsonLevel next = refiner.current();
    const double diff = std::abs(next.value - previous.value);
    if (diff <= options.rel_tol * next.abs_value) {
      return {next.value, diff / 15.0, refiner.panels()};
    }
    previous = next;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "Simpson quadrature on [" << a << ", " << b << "] did not reach rel_tol "
      << options.rel_tol << " after " << options.max_halvings
      << " halvings; last estimate " << previous.value << " with " << refiner.panels()
      << " panels";
  throw NumericalError(msg.str());
}

}  // namespace wpflux
