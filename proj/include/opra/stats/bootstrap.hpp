#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "opra/core/bands.hpp"
#include "opra/stats/rng.hpp"

namespace opra::stats {

/// Interpolated empirical quantile (linear interpolation of order statistics,
/// the common "type 7" rule) of an unsorted sample.
inline double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile: empty sample");
  std::sort(values.begin(), values.end());
  if (p <= 0.0) return values.front();
  if (p >= 1.0) return values.back();
  double h = (static_cast<double>(values.size()) - 1.0) * p;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

inline double mean(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("mean: empty sample");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

/// Sample standard deviation (n-1 denominator).
inline double sample_sd(const std::vector<double>& values) {
  if (values.size() < 2) throw ValidationError("sample_sd: need at least 2 values");
  double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / (static_cast<double>(values.size()) - 1.0));
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median: empty sample");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapResult {
  double point = 0.0;          // statistic on the original sample
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  ConfidenceInterval ci68;
  ConfidenceInterval ci95;
  std::vector<double> replicate_values;  // in replicate order (kept for emitters)
};

namespace detail {

/// Runs fn(i) for i in [0, n) over a small thread pool. Each index is
/// independent; output ordering is the caller's responsibility.
inline void parallel_for(std::uint64_t n, unsigned workers,
                         const std::function<void(std::uint64_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::uint64_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t begin = w * chunk;
    std::uint64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::uint64_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Percentile bootstrap of an arbitrary statistic. Resamples are of the
/// original size, drawn with replacement; replicate i is fully determined by
/// (seed, i), so the result is identical for any worker count.
///
/// A statistic that cannot be evaluated on some resample must throw; the
/// error is reported with the replicate index.
inline BootstrapResult bootstrap_ci(
    const std::vector<double>& data,
    const std::function<double(const std::vector<double>&)>& statistic,
    std::uint64_t replicates, std::uint64_t seed, unsigned workers = 1) {
  if (data.empty()) throw ValidationError("bootstrap_ci: empty data");
  if (replicates < 1) throw ValidationError("bootstrap_ci: need at least 1 replicate");

  BootstrapResult out;
  out.point = statistic(data);
  out.replicates = replicates;
  out.seed = seed;
  out.replicate_values.assign(replicates, 0.0);

  std::vector<std::string> failure;  // first failure message wins
  std::mutex failure_mutex;
  detail::parallel_for(replicates, workers, [&](std::uint64_t i) {
    SplitMix64 rng = replicate_rng(seed, i);
    std::vector<double> resample(data.size());
    for (auto& v : resample) v = data[rng.next_below(data.size())];
    try {
      out.replicate_values[i] = statistic(resample);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (failure.empty())
        failure.push_back("bootstrap replicate " + std::to_string(i) + ": " + e.what());
    }
  });
  if (!failure.empty()) throw ValidationError(failure.front());

  out.ci68 = {quantile(out.replicate_values, 0.16), quantile(out.replicate_values, 0.84)};
  out.ci95 = {quantile(out.replicate_values, 0.025), quantile(out.replicate_values, 0.975)};
  return out;
}

}  // namespace opra::stats
