#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opra/core/bands.hpp"

namespace opra {

enum class Direction { forward, reverse };

inline std::string to_string(Direction d) {
  return d == Direction::forward ? "forward" : "reverse";
}

inline Direction direction_from_string(const std::string& s) {
  if (s == "forward") return Direction::forward;
  if (s == "reverse") return Direction::reverse;
  throw ValidationError("unknown direction: " + s);
}

/// One microphone position along a measurement path.
struct ReceiverPoint {
  double distance_m = 0.0;              // source to receiver, along the path
  OctaveBandSpectrum spectrum;          // measured speech/sweep band SPL
  std::optional<OctaveBandSpectrum> noise;  // background noise band SPL
  std::optional<std::array<double, kNumBands>> t30_s;  // per-band T30, if known
  std::string id;                       // channel / receiver label
};

/// Receiver-count bounds used when validating a measurement run.
struct ReceiverBounds {
  std::size_t min_receivers = 5;
  std::size_t max_receivers = 8;
};

/// One measurement run along a path. The two runs of a repeated pair share
/// office_id and path_id and differ in run_index (1 or 2).
struct PathMeasurement {
  int office_id = 0;
  int path_id = 0;
  int run_index = 1;
  Direction direction = Direction::forward;
  std::vector<ReceiverPoint> receivers;       // sorted by strictly increasing distance
  OctaveBandSpectrum source_power;            // sound power of the source, dB re 1 pW
  double calibration_offset_db = 0.0;         // applied when levels come from audio

  void validate(const ReceiverBounds& bounds = {}) const {
    if (run_index != 1 && run_index != 2)
      throw ValidationError(context() + ": run_index must be 1 or 2");
    if (receivers.size() < bounds.min_receivers || receivers.size() > bounds.max_receivers)
      throw ValidationError(context() + ": receiver count " +
                            std::to_string(receivers.size()) + " outside [" +
                            std::to_string(bounds.min_receivers) + ", " +
                            std::to_string(bounds.max_receivers) + "]");
    check_distances();
  }

  /// Distance ordering alone; used where receiver-count bounds do not apply.
  void check_distances() const {
    double prev = 0.0;
    for (std::size_t i = 0; i < receivers.size(); ++i) {
      double d = receivers[i].distance_m;
      if (!(d > 0.0))
        throw ValidationError(context() + ": receiver " + std::to_string(i + 1) +
                              " distance must be > 0");
      if (i > 0 && !(d > prev))
        throw ValidationError(context() + ": distances not strictly increasing between receivers " +
                              std::to_string(i) + " and " + std::to_string(i + 1));
      prev = d;
    }
  }

  std::vector<double> distances() const {
    std::vector<double> out;
    out.reserve(receivers.size());
    for (const auto& r : receivers) out.push_back(r.distance_m);
    return out;
  }

  std::string context() const {
    return "office " + std::to_string(office_id) + " path " + std::to_string(path_id) +
           " run " + std::to_string(run_index);
  }
};

/// Computed metric set for one measurement run.
struct MetricSet {
  double d2s_db = 0.0;                  // spatial decay rate, dB per distance doubling
  double lpas4m_db = 0.0;               // A-weighted speech level at 4 m
  std::optional<double> rd_m;           // distraction distance; absent = undefined
  bool rd_valid = false;                // within the 10%-extended distance window
  std::optional<double> lpab_dba;       // A-weighted background level
  std::optional<double> t30_mid_s;      // mid-frequency reverberation time
  double fit_r2_speech = 0.0;
  double fit_r2_sti = 0.0;
  double noise_gain_db = 0.0;           // uniform gain applied to noise, if any
  bool lpas4m_extrapolated = false;     // 4 m lay outside the measured span

  void check_invariants() const {
    if (rd_m && !(*rd_m > 0.0)) throw ValidationError("MetricSet: rd_m must be > 0");
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(fit_r2_speech) || !in01(fit_r2_sti))
      throw ValidationError("MetricSet: fit R^2 outside [0, 1]");
  }
};

}  // namespace opra
