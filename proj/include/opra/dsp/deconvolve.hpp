#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "opra/dsp/fft.hpp"
#include "opra/dsp/impulse_response.hpp"

namespace opra::dsp {

struct DeconvolveOptions {
  /// Spectral-division regularization relative to the sweep's peak power
  /// spectrum. The default is small enough that clean synthetic material is
  /// recovered essentially exactly; raise it for noisy recordings.
  double regularization = 1e-12;
  /// Portion of the acausal (negative-lag) region to keep ahead of t = 0.
  /// Nonlinear harmonic products land there and are cut away by default.
  double pre_roll_s = 0.0;
  /// Cap on the returned impulse-response length.
  std::optional<double> max_length_s;
};

/// Recover the linear impulse response of a system from its response to an
/// exponential sweep, by regularized spectral division:
///   H = R conj(S) / (|S|^2 + eps).
/// Harmonic distortion maps to negative lags and is truncated by the
/// pre-roll window.
inline ImpulseResponse deconvolve_sweep(const std::vector<double>& recording,
                                        double recording_rate_hz, const SweepSpec& sweep,
                                        double sweep_rate_hz,
                                        const DeconvolveOptions& options = {}) {
  if (recording_rate_hz != sweep_rate_hz)
    throw ValidationError("deconvolve_sweep: sample rates differ (" +
                          std::to_string(recording_rate_hz) + " vs " +
                          std::to_string(sweep_rate_hz) + " Hz)");
  std::vector<double> sweep_signal = synthesize_sweep(sweep, sweep_rate_hz);
  if (recording.size() < sweep_signal.size())
    throw ValidationError("deconvolve_sweep: recording shorter than the sweep");

  std::size_t n = next_pow2(recording.size() + sweep_signal.size());
  std::vector<std::complex<double>> rec(n), ref(n);
  for (std::size_t i = 0; i < recording.size(); ++i) rec[i] = recording[i];
  for (std::size_t i = 0; i < sweep_signal.size(); ++i) ref[i] = sweep_signal[i];
  fft_inplace(rec, false);
  fft_inplace(ref, false);

  double peak_power = 0.0;
  for (const auto& v : ref) peak_power = std::max(peak_power, std::norm(v));
  double eps = options.regularization * peak_power;
  for (std::size_t i = 0; i < n; ++i)
    rec[i] = rec[i] * std::conj(ref[i]) / (std::norm(ref[i]) + eps);
  fft_inplace(rec, true);

  std::size_t pre = static_cast<std::size_t>(std::round(options.pre_roll_s * recording_rate_hz));
  std::size_t causal_len = recording.size();
  if (options.max_length_s)
    causal_len = std::min(causal_len, static_cast<std::size_t>(
                                          std::round(*options.max_length_s * recording_rate_hz)));
  ImpulseResponse ir;
  ir.sample_rate_hz = recording_rate_hz;
  ir.samples.reserve(pre + causal_len);
  for (std::size_t i = 0; i < pre; ++i)
    ir.samples.push_back(rec[n - pre + i].real());  // wrapped negative lags
  for (std::size_t i = 0; i < causal_len; ++i) ir.samples.push_back(rec[i].real());
  return ir;
}

}  // namespace opra::dsp
