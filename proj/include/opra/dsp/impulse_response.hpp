#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "opra/core/bands.hpp"

namespace opra::dsp {

struct ImpulseResponse {
  std::vector<double> samples;
  double sample_rate_hz = 48000.0;
  std::string receiver_id;

  void validate() const {
    if (!(sample_rate_hz > 0.0))
      throw ValidationError("ImpulseResponse: sample rate must be > 0");
    if (samples.empty()) throw ValidationError("ImpulseResponse: empty sample sequence");
    for (double s : samples)
      if (!std::isfinite(s)) throw ValidationError("ImpulseResponse: non-finite sample");
  }

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  double energy() const {
    double acc = 0.0;
    for (double s : samples) acc += s * s;
    return acc;
  }
};

/// Exponentially swept sinusoid specification.
struct SweepSpec {
  double f_start_hz = 50.0;
  double f_end_hz = 20000.0;
  double duration_s = 30.0;
  double amplitude = 1.0;  // linear peak amplitude

  void validate(double sample_rate_hz) const {
    if (!(f_start_hz > 0.0) || !(f_end_hz > f_start_hz))
      throw ValidationError("SweepSpec: need 0 < f_start < f_end");
    if (f_end_hz > sample_rate_hz / 2.0)
      throw ValidationError("SweepSpec: f_end above Nyquist");
    if (!(duration_s > 0.0)) throw ValidationError("SweepSpec: duration must be > 0");
  }
};

/// x(t) = A sin(2 pi f1 L (e^{t/L} - 1)) with L = T / ln(f2/f1).
inline std::vector<double> synthesize_sweep(const SweepSpec& spec, double sample_rate_hz) {
  spec.validate(sample_rate_hz);
  const double pi = 3.14159265358979323846;
  double L = spec.duration_s / std::log(spec.f_end_hz / spec.f_start_hz);
  std::size_t n = static_cast<std::size_t>(std::round(spec.duration_s * sample_rate_hz));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sample_rate_hz;
    out[i] = spec.amplitude * std::sin(2.0 * pi * spec.f_start_hz * L * (std::exp(t / L) - 1.0));
  }
  return out;
}

}  // namespace opra::dsp
