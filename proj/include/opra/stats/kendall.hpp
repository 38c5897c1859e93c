#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "opra/core/bands.hpp"
#include "opra/stats/bootstrap.hpp"
#include "opra/stats/rng.hpp"

namespace opra::stats {

/// Tie-corrected Kendall rank correlation (tau-b).
/// O(n^2) pair scan; the samples here are dozens of points.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("kendall_tau_b: size mismatch");
  std::size_t n = x.size();
  if (n < 2) throw ValidationError("kendall_tau_b: need at least 2 pairs");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = x[i] - x[j];
      double b = y[i] - y[j];
      if (a == 0.0 && b == 0.0) {
        ++ties_x;
        ++ties_y;
      } else if (a == 0.0) {
        ++ties_x;
      } else if (b == 0.0) {
        ++ties_y;
      } else if ((a > 0.0) == (b > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  double denom = std::sqrt((n0 - static_cast<double>(ties_x)) *
                           (n0 - static_cast<double>(ties_y)));
  if (denom == 0.0)
    throw ValidationError("kendall_tau_b: zero variance in both variables");
  return static_cast<double>(concordant - discordant) / denom;
}

struct KendallResult {
  double tau = 0.0;
  ConfidenceInterval ci95;
  std::uint64_t replicates = 0;
  std::uint64_t skipped = 0;  // degenerate resamples (all-tied variable)
  std::uint64_t seed = 0;
};

/// tau-b with a pair-resampling percentile bootstrap CI. Resamples in which
/// either variable degenerates to a single value carry no rank information
/// and are excluded from the percentile computation (count reported).
inline KendallResult kendall_tau(const std::vector<double>& x, const std::vector<double>& y,
                                 std::uint64_t replicates, std::uint64_t seed,
                                 unsigned workers = 1) {
  KendallResult out;
  out.tau = kendall_tau_b(x, y);
  out.replicates = replicates;
  out.seed = seed;
  std::size_t n = x.size();

  std::vector<double> values(replicates, 0.0);
  std::vector<char> valid(replicates, 0);
  detail::parallel_for(replicates, workers, [&](std::uint64_t i) {
    SplitMix64 rng = replicate_rng(seed, i);
    std::vector<double> rx(n), ry(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t idx = rng.next_below(n);
      rx[j] = x[idx];
      ry[j] = y[idx];
    }
    try {
      values[i] = kendall_tau_b(rx, ry);
      valid[i] = 1;
    } catch (const ValidationError&) {
      valid[i] = 0;
    }
  });

  std::vector<double> kept;
  kept.reserve(replicates);
  for (std::uint64_t i = 0; i < replicates; ++i) {
    if (valid[i]) kept.push_back(values[i]);
    else ++out.skipped;
  }
  if (kept.empty()) throw ValidationError("kendall_tau: every resample degenerate");
  out.ci95 = {quantile(kept, 0.025), quantile(kept, 0.975)};
  return out;
}

}  // namespace opra::stats
