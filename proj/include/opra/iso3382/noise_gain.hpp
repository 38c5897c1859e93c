#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "opra/iso3382/metrics.hpp"

namespace opra::iso3382 {

struct GainSearchOptions {
  double window_db = 20.0;  // search |gain| up to this
  double grid_db = 0.5;
  double resolution_db = 0.1;
};

/// Raised when no uniform gain within the window makes every path valid;
/// carries the most successful attempt for diagnostics.
class GainSearchError : public ValidationError {
public:
  GainSearchError(const std::string& message, double best_gain_db, std::size_t paths_valid)
      : ValidationError(message), best_gain_db(best_gain_db), paths_valid(paths_valid) {}
  double best_gain_db;
  std::size_t paths_valid;
};

struct GainAdjustment {
  double gain_db = 0.0;
  std::vector<MetricSet> metrics;  // per run, recomputed at the returned gain
};

namespace detail {

inline std::size_t count_valid(const std::vector<PathMeasurement>& runs,
                               const MetricOptions& base, double gain_db,
                               const std::vector<std::vector<dsp::MtfMatrix>>& mtfs,
                               std::vector<MetricSet>* out = nullptr) {
  MetricOptions options = base;
  options.noise_gain_db = gain_db;
  std::size_t valid = 0;
  if (out) out->clear();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    MetricSet m = mtfs.empty() ? compute_metric_set(runs[i], options)
                               : compute_metric_set(runs[i], options, mtfs[i]);
    if (m.rd_m && m.rd_valid) ++valid;
    if (out) out->push_back(std::move(m));
  }
  return valid;
}

}  // namespace detail

/// Smallest-magnitude uniform noise gain under which every run of the office
/// has a defined, in-window distraction distance. The same gain applies to
/// all bands of all paths. Searched on a coarse grid outward from zero (the
/// positive candidate first at equal magnitude), then sharpened by bisection
/// against the nearest invalid gain.
inline GainAdjustment adjust_background_gain(
    const std::vector<PathMeasurement>& runs, const MetricOptions& metric_options = {},
    const GainSearchOptions& search = {},
    const std::vector<std::vector<dsp::MtfMatrix>>& mtfs = {}) {
  if (runs.empty()) throw ValidationError("adjust_background_gain: no runs");
  if (!mtfs.empty() && mtfs.size() != runs.size())
    throw ValidationError("adjust_background_gain: MTF set does not match run count");
  GainAdjustment result;
  std::size_t n = runs.size();

  if (detail::count_valid(runs, metric_options, 0.0, mtfs, &result.metrics) == n) {
    result.gain_db = 0.0;
    return result;
  }

  double best_gain = 0.0;
  std::size_t best_valid = 0;
  double found = std::numeric_limits<double>::quiet_NaN();
  for (double mag = search.grid_db; mag <= search.window_db + 1e-9 && std::isnan(found);
       mag += search.grid_db) {
    for (double candidate : {mag, -mag}) {
      std::size_t valid = detail::count_valid(runs, metric_options, candidate, mtfs);
      if (valid > best_valid) {
        best_valid = valid;
        best_gain = candidate;
      }
      if (valid == n) {
        found = candidate;
        break;
      }
    }
  }
  if (std::isnan(found))
    throw GainSearchError(
        "adjust_background_gain: no gain within +-" + std::to_string(search.window_db) +
            " dB achieves validity (best attempt " + std::to_string(best_gain) + " dB, " +
            std::to_string(best_valid) + "/" + std::to_string(n) + " runs valid)",
        best_gain, best_valid);

  // Bisect between the last invalid gain on the zero side and the valid one.
  double valid_gain = found;
  double invalid_gain = (std::abs(found) <= search.grid_db + 1e-9)
                            ? 0.0
                            : found - std::copysign(search.grid_db, found);
  while (std::abs(valid_gain - invalid_gain) > search.resolution_db) {
    double mid = 0.5 * (valid_gain + invalid_gain);
    if (detail::count_valid(runs, metric_options, mid, mtfs) == n)
      valid_gain = mid;
    else
      invalid_gain = mid;
  }
  result.gain_db = valid_gain;
  detail::count_valid(runs, metric_options, valid_gain, mtfs, &result.metrics);
  return result;
}

}  // namespace opra::iso3382
