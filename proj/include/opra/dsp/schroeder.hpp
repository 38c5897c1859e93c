#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "opra/dsp/impulse_response.hpp"

namespace opra::dsp {

struct DecayCurve {
  std::vector<double> level_db;  // 0 dB at t = 0, non-increasing trend
  double sample_rate_hz = 0.0;
  std::size_t truncation_index = 0;  // end of the integrated range
  bool degenerate = false;           // no energy beyond the first sample

  double time_s(std::size_t index) const {
    return static_cast<double>(index) / sample_rate_hz;
  }
};

struct SchroederOptions {
  /// Manual truncation point; when absent the noise floor is estimated from
  /// the final 10% of the response and integration stops where the smoothed
  /// energy last stays 5 dB above it.
  std::optional<double> truncation_s;
  double smoothing_window_s = 0.01;
};

/// Reverse-integrated energy decay: L(t) = 10 log10( sum_{t..T} h^2 / sum h^2 ).
inline DecayCurve schroeder_decay(const ImpulseResponse& ir_band,
                                  const SchroederOptions& options = {}) {
  ir_band.validate();
  const auto& h = ir_band.samples;
  std::size_t n = h.size();
  std::vector<double> energy(n);
  for (std::size_t i = 0; i < n; ++i) energy[i] = h[i] * h[i];

  std::size_t trunc = n;
  if (options.truncation_s) {
    trunc = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::round(*options.truncation_s * ir_band.sample_rate_hz)));
    if (trunc == 0) throw ValidationError("schroeder_decay: truncation before the response");
  } else if (n >= 20) {
    // Noise floor from the final 10%; truncate after the last window whose
    // mean energy still clears the floor by 5 dB.
    std::size_t tail = std::max<std::size_t>(1, n / 10);
    double floor_power = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) floor_power += energy[i];
    floor_power /= static_cast<double>(tail);
    if (floor_power > 0.0) {
      std::size_t win = std::max<std::size_t>(
          1, static_cast<std::size_t>(options.smoothing_window_s * ir_band.sample_rate_hz));
      double threshold = floor_power * std::pow(10.0, 0.5);
      std::size_t last_above = 0;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += energy[i];
        if (i >= win) acc -= energy[i - win];
        double mean_power = acc / static_cast<double>(std::min(i + 1, win));
        if (mean_power > threshold) last_above = i;
      }
      if (last_above > 0) trunc = std::min(n, last_above + 1);
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < trunc; ++i) total += energy[i];
  if (total <= 0.0) throw ValidationError("schroeder_decay: zero-energy response");

  DecayCurve curve;
  curve.sample_rate_hz = ir_band.sample_rate_hz;
  curve.truncation_index = trunc;
  curve.level_db.resize(trunc);
  double remaining = total;
  for (std::size_t i = 0; i < trunc; ++i) {
    curve.level_db[i] = (remaining > 0.0) ? 10.0 * std::log10(remaining / total)
                                          : -std::numeric_limits<double>::infinity();
    remaining -= energy[i];
  }
  double after_first = total - energy[0];
  curve.degenerate = !(after_first > 0.0);
  return curve;
}

struct T30Result {
  double t30_s = 0.0;
  double fit_r_squared = 0.0;
  double slope_db_per_s = 0.0;
};

/// Reverberation time from the -5..-35 dB span of a decay curve: twice the
/// time the fitted line needs to traverse 30 dB.
inline T30Result t30(const DecayCurve& decay) {
  if (decay.degenerate) throw ValidationError("t30: degenerate decay curve");
  const auto& level = decay.level_db;
  std::size_t start = level.size(), stop = level.size();
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (start == level.size() && level[i] <= -5.0) start = i;
    if (level[i] <= -35.0) {
      stop = i;
      break;
    }
  }
  if (start >= level.size() || stop >= level.size() || stop <= start + 1)
    throw ValidationError("t30: decay range does not span -5..-35 dB");

  double n = static_cast<double>(stop - start + 1);
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t i = start; i <= stop; ++i) {
    double t = decay.time_s(i);
    double l = level[i];
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    sll += l * l;
  }
  double cov = stl - st * sl / n;
  double var_t = stt - st * st / n;
  double var_l = sll - sl * sl / n;
  if (!(var_t > 0.0) || !(cov < 0.0))
    throw ValidationError("t30: fit range has no usable decay slope");
  double slope = cov / var_t;
  T30Result result;
  result.slope_db_per_s = slope;
  result.t30_s = -60.0 / slope;
  result.fit_r_squared = (var_l > 0.0) ? (cov * cov) / (var_t * var_l) : 1.0;
  return result;
}

/// Mid-frequency reverberation time: per receiver, the mean of the 500 Hz and
/// 1 kHz values; then the arithmetic mean over receivers.
struct ReceiverT30 {
  std::optional<double> t500_s;
  std::optional<double> t1000_s;
};

inline double t30_mid(const std::vector<ReceiverT30>& receivers) {
  double acc = 0.0;
  std::size_t used = 0;
  for (const auto& r : receivers) {
    if (r.t500_s && r.t1000_s) {
      acc += 0.5 * (*r.t500_s + *r.t1000_s);
      ++used;
    }
  }
  if (used == 0)
    throw ValidationError("t30_mid: no receiver carries both mid-band values");
  return acc / static_cast<double>(used);
}

}  // namespace opra::dsp
