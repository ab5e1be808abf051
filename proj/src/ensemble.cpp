#include "wpflux/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wpflux/errors.hpp"

namespace wpflux {

void MomentAccumulator::add(std::span<const double> sample) {
  if (sample.size() != mean_.size()) throw UsageError("moment accumulator: width mismatch");
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    const double delta = sample[j] - mean_[j];
    mean_[j] += delta * inv;
    m2_[j] += delta * (sample[j] - mean_[j]);
  }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    const double delta = other.mean_[j] - mean_[j];
    mean_[j] += delta * (nb / n);
    m2_[j] += other.m2_[j] + delta * delta * (na * nb / n);
  }
  count_ += other.count_;
}

EnsembleStats MomentAccumulator::stats() const {
  EnsembleStats out;
  out.n = count_;
  out.mean = mean_;
  out.std_error.assign(mean_.size(), 0.0);
  if (count_ >= 2) {
    const double n = static_cast<double>(count_);
    for (std::size_t j = 0; j < mean_.size(); ++j) {
      out.std_error[j] = std::sqrt(std::max(m2_[j], 0.0) / (n - 1.0) / n);
    }
  }
  return out;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Pulls task indices from a shared counter; rethrows the first exception.
void run_tasks(std::size_t n_tasks, unsigned workers, const std::function<void(std::size_t)>& task) {
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n_tasks, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto loop = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_tasks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

EnsembleStats ensemble_moments(std::size_t n_items, std::size_t width,
                               const std::function<void(std::size_t, std::span<double>)>& sample,
                               const ParallelOptions& options) {
  const std::size_t block = std::max<std::size_t>(options.block_size, 1);
  const std::size_t n_blocks = (n_items + block - 1) / block;
  std::vector<MomentAccumulator> partial(n_blocks, MomentAccumulator(width));

  run_tasks(n_blocks, resolve_workers(options.workers), [&](std::size_t b) {
    std::vector<double> scratch(width);
    const std::size_t end = std::min(n_items, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) {
      sample(i, scratch);
      partial[b].add(scratch);
    }
  });

  if (partial.empty()) return MomentAccumulator(width).stats();
  for (std::size_t stride = 1; stride < partial.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < partial.size(); i += 2 * stride) {
      partial[i].merge(partial[i + stride]);
    }
  }
  return partial.front().stats();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  const ParallelOptions& options) {
  const std::size_t block = std::max<std::size_t>(options.block_size, 1);
  const std::size_t n_blocks = (n + block - 1) / block;
  run_tasks(n_blocks, resolve_workers(options.workers), [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) body(i);
  });
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw UsageError("fit_line needs at least three paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw UsageError("fit_line: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    rss += r * r;
  }
  fit.slope_std_error = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

ScalarEstimate mean_with_std_error(std::span<const double> samples) {
  MomentAccumulator acc(1);
  for (double v : samples) acc.add(std::span<const double>(&v, 1));
  const auto s = acc.stats();
  return {s.mean.empty() ? 0.0 : s.mean[0], s.std_error.empty() ? 0.0 : s.std_error[0]};
}

}  // namespace wpflux
