#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "opra/core/bands.hpp"
#include "opra/dsp/impulse_response.hpp"

namespace opra::dsp {

inline constexpr std::size_t kNumModulationFrequencies = 14;

/// Third-octave spaced modulation frequencies, 0.63..12.5 Hz.
inline constexpr std::array<double, kNumModulationFrequencies> kModulationFrequenciesHz = {
    0.63, 0.80, 1.00, 1.25, 1.60, 2.00, 2.50, 3.15, 4.00, 5.00, 6.30, 8.00, 10.00, 12.50};

/// 7 bands x 14 modulation frequencies of modulation transfer values in [0, 1].
struct MtfMatrix {
  std::array<std::array<double, kNumModulationFrequencies>, kNumBands> m{};

  void validate() const {
    for (const auto& row : m)
      for (double v : row)
        if (!(v >= 0.0 && v <= 1.0))
          throw ValidationError("MtfMatrix: entry outside [0, 1]");
  }
};

struct MtfOptions {
  /// Constant noise power subtracted from the squared response before
  /// integration (clamped at zero). Off by default.
  double noise_floor_power = 0.0;
};

/// Noise-free modulation transfer of a band-limited impulse response:
///   m(F) = | sum h^2(t) e^{-j 2 pi F t} | / sum h^2(t).
inline std::array<double, kNumModulationFrequencies> mtf_from_ir(
    const ImpulseResponse& ir_band, const MtfOptions& options = {}) {
  ir_band.validate();
  const double pi = 3.14159265358979323846;
  std::size_t n = ir_band.samples.size();
  std::vector<double> energy(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = ir_band.samples[i] * ir_band.samples[i] - options.noise_floor_power;
    energy[i] = std::max(0.0, e);
    total += energy[i];
  }
  if (!(total > 0.0)) throw ValidationError("mtf_from_ir: zero-energy response");

  std::array<double, kNumModulationFrequencies> out{};
  for (std::size_t f = 0; f < kNumModulationFrequencies; ++f) {
    double w = 2.0 * pi * kModulationFrequenciesHz[f] / ir_band.sample_rate_hz;
    // Phasor recurrence with periodic re-anchoring against drift.
    std::complex<double> step = std::polar(1.0, -w);
    std::complex<double> phasor(1.0, 0.0);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if ((i & 0xFFF) == 0) phasor = std::polar(1.0, -w * static_cast<double>(i));
      acc += energy[i] * phasor;
      phasor *= step;
    }
    out[f] = std::min(1.0, std::abs(acc) / total);
  }
  return out;
}

/// Multiplicative background-noise correction of a modulation transfer value:
///   m' = m / (1 + 10^(-SNR/10)).
/// An infinite SNR leaves m unchanged; the correction never increases m.
inline double apply_noise_correction(double m, double snr_db) {
  if (!(m >= 0.0 && m <= 1.0))
    throw ValidationError("apply_noise_correction: m outside [0, 1]");
  if (snr_db == std::numeric_limits<double>::infinity()) return m;
  return m / (1.0 + std::pow(10.0, -snr_db / 10.0));
}

/// Closed-form modulation transfer of an ideal exponential decay with
/// reverberation time T: [1 + (2 pi F T / 13.8)^2]^(-1/2). The constant is
/// 2 ln(10^3), the energy decay rate that loses 60 dB in T.
inline double mtf_exponential(double modulation_hz, double t_s) {
  const double pi = 3.14159265358979323846;
  const double k = 2.0 * 6.907755278982137;  // 2 * ln(1000)
  double x = 2.0 * pi * modulation_hz * t_s / k;
  return 1.0 / std::sqrt(1.0 + x * x);
}

}  // namespace opra::dsp
