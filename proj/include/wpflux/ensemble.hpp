#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wpflux {

/// Per-sample ensemble mean and standard error over n realizations.
struct EnsembleStats {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t n = 0;
};

struct ParallelOptions {
  unsigned workers = 0;  // 0: std::thread::hardware_concurrency()
  std::size_t block_size = 32;
};

/// Running (count, mean, M2) per component; merged with Chan's update.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t width = 0) : mean_(width, 0.0), m2_(width, 0.0) {}

  void add(std::span<const double> sample);
  void merge(const MomentAccumulator& other);

  std::size_t count() const { return count_; }
  EnsembleStats stats() const;

 private:
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Mean and standard error of `width`-component samples produced by
/// sample(i, out) for i in [0, n_items). Items are grouped into fixed blocks,
/// each block accumulated in index order, and blocks combined by a pairwise
/// tree in block order. The result is bit-identical for any worker count.
EnsembleStats ensemble_moments(std::size_t n_items, std::size_t width,
                               const std::function<void(std::size_t, std::span<double>)>& sample,
                               const ParallelOptions& options = {});

/// Runs body(i) for every i in [0, n) across worker threads. Each index must
/// write only to its own output slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  const ParallelOptions& options = {});

unsigned resolve_workers(unsigned requested);

/// 64-bit seed for stream `index` derived from a base seed (splitmix64
/// finalizer over both words), so every realization owns an independent
/// generator without shared state.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScalarEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

ScalarEstimate mean_with_std_error(std::span<const double> samples);

}  // namespace wpflux
