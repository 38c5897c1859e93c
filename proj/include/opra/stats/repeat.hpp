#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "opra/core/bands.hpp"

namespace opra::stats {

/// k observed values of one metric under repeatability conditions.
/// Type1: one path measured from both ends (k = 2).
/// Type2: two paths in the same office, both directions each (k = 4).
struct RepeatGroup {
  std::string group_id;
  std::string metric_id;
  std::vector<double> values;

  void validate() const {
    if (values.size() < 2)
      throw ValidationError("RepeatGroup " + group_id + ": need k >= 2 values");
    for (double v : values)
      if (!std::isfinite(v))
        throw ValidationError("RepeatGroup " + group_id + ": non-finite value");
  }
};

/// Range (max - min) of one group's observations, with the group mean kept
/// alongside for range-vs-magnitude comparisons.
struct DeltaRecord {
  std::string group_id;
  std::string metric_id;
  double delta = 0.0;
  double group_mean = 0.0;
};

inline DeltaRecord delta_range(const RepeatGroup& group) {
  group.validate();
  auto [lo, hi] = std::minmax_element(group.values.begin(), group.values.end());
  double sum = 0.0;
  for (double v : group.values) sum += v;
  return {group.group_id, group.metric_id, *hi - *lo,
          sum / static_cast<double>(group.values.size())};
}

inline double mean_delta(const std::vector<DeltaRecord>& deltas) {
  if (deltas.empty()) throw ValidationError("mean_delta: empty input");
  double sum = 0.0;
  for (const auto& d : deltas) sum += d.delta;
  return sum / static_cast<double>(deltas.size());
}

inline std::vector<double> delta_values(const std::vector<DeltaRecord>& deltas) {
  std::vector<double> out;
  out.reserve(deltas.size());
  for (const auto& d : deltas) out.push_back(d.delta);
  return out;
}

inline std::vector<double> mean_values(const std::vector<DeltaRecord>& deltas) {
  std::vector<double> out;
  out.reserve(deltas.size());
  for (const auto& d : deltas) out.push_back(d.group_mean);
  return out;
}

}  // namespace opra::stats
