#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "opra/dsp/impulse_response.hpp"

namespace opra::dsp {

/// One second-order section, normalized so a0 = 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Cascade of second-order sections (direct form II transposed).
class SosFilter {
public:
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  std::vector<double> filter(const std::vector<double>& x) const {
    std::vector<double> y = x;
    for (const auto& s : sections_) {
      double z1 = 0.0, z2 = 0.0;
      for (double& v : y) {
        double in = v;
        double out = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * out + z2;
        z2 = s.b2 * in - s.a2 * out;
        v = out;
      }
    }
    return y;
  }

  /// Forward-backward application (zero phase, squared magnitude). The input
  /// is zero-padded by `pad` samples so the ring-out is kept in the result.
  std::vector<double> filtfilt(const std::vector<double>& x, std::size_t pad) const {
    std::vector<double> padded = x;
    padded.resize(x.size() + pad, 0.0);
    std::vector<double> y = filter(padded);
    std::reverse(y.begin(), y.end());
    y = filter(y);
    std::reverse(y.begin(), y.end());
    return y;
  }

  /// Frequency response at `freq_hz` for rate `sample_rate_hz`.
  std::complex<double> response(double freq_hz, double sample_rate_hz) const {
    const double pi = 3.14159265358979323846;
    double w = 2.0 * pi * freq_hz / sample_rate_hz;
    std::complex<double> z1 = std::polar(1.0, -w);
    std::complex<double> z2 = z1 * z1;
    std::complex<double> h(1.0, 0.0);
    for (const auto& s : sections_)
      h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    return h;
  }

  const std::vector<Biquad>& sections() const { return sections_; }

private:
  std::vector<Biquad> sections_;
};

/// Butterworth band-pass of order 12 (6th-order low-pass prototype through
/// the band-pass transform), bilinear-mapped, with octave band edges
/// fc/sqrt(2) .. fc*sqrt(2) and unit gain pinned at the band centre.
inline SosFilter design_octave_bandpass(double center_hz, double sample_rate_hz) {
  const double pi = 3.14159265358979323846;
  double f_low = center_hz / std::sqrt(2.0);
  double f_high = center_hz * std::sqrt(2.0);
  if (f_high >= sample_rate_hz / 2.0)
    throw ValidationError("octave band at " + std::to_string(center_hz) +
                          " Hz exceeds Nyquist for fs = " + std::to_string(sample_rate_hz));

  // Prewarped analog edges for the bilinear map s = (1 - z^-1)/(1 + z^-1).
  double w1 = std::tan(pi * f_low / sample_rate_hz);
  double w2 = std::tan(pi * f_high / sample_rate_hz);
  double w0_sq = w1 * w2;
  double bw = w2 - w1;

  constexpr int kPrototypeOrder = 6;
  std::vector<Biquad> sections;
  for (int k = 1; k <= kPrototypeOrder / 2; ++k) {
    double angle = pi * (2.0 * k + kPrototypeOrder - 1.0) / (2.0 * kPrototypeOrder);
    std::complex<double> proto = std::polar(1.0, angle);  // upper half-plane pole
    // Band-pass transform: each prototype pole yields two analog poles.
    std::complex<double> bp = bw * proto;
    std::complex<double> disc = std::sqrt(bp * bp - 4.0 * w0_sq);
    for (std::complex<double> s : {(bp + disc) / 2.0, (bp - disc) / 2.0}) {
      std::complex<double> z = (1.0 + s) / (1.0 - s);
      Biquad biquad;
      biquad.b0 = 1.0;
      biquad.b1 = 0.0;
      biquad.b2 = -1.0;  // zeros at z = +1 and z = -1
      biquad.a1 = -2.0 * z.real();
      biquad.a2 = std::norm(z);
      sections.push_back(biquad);
    }
  }

  SosFilter unnormalized(std::move(sections));
  double gain = std::abs(unnormalized.response(center_hz, sample_rate_hz));
  if (!(gain > 0.0)) throw ValidationError("octave filter design degenerated");
  double per_section = std::pow(gain, -1.0 / static_cast<double>(unnormalized.sections().size()));
  std::vector<Biquad> scaled = unnormalized.sections();
  for (auto& s : scaled) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return SosFilter(std::move(scaled));
}

/// Band-limit an impulse response to one octave band. Zero-phase mode doubles
/// the magnitude response and cancels group delay; it is the variant used
/// ahead of decay fitting.
inline ImpulseResponse octave_filter(const ImpulseResponse& ir, double band_center_hz,
                                     bool zero_phase = false) {
  ir.validate();
  SosFilter sos = design_octave_bandpass(band_center_hz, ir.sample_rate_hz);
  ImpulseResponse out;
  out.sample_rate_hz = ir.sample_rate_hz;
  out.receiver_id = ir.receiver_id;
  if (zero_phase) {
    std::size_t pad = std::max<std::size_t>(1024, static_cast<std::size_t>(ir.sample_rate_hz / 8));
    out.samples = sos.filtfilt(ir.samples, pad);
  } else {
    out.samples = sos.filter(ir.samples);
  }
  return out;
}

}  // namespace opra::dsp
