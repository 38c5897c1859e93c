#pragma once

#include <algorithm>
#include <cmath>

#include "opra/dsp/mtf.hpp"
#include "opra/iso3382/constants.hpp"

namespace opra::iso3382 {

/// Speech transmission index from a (noise-corrected) modulation transfer
/// matrix: per entry the effective SNR 10 log10(m / (1-m)) clipped to
/// +-15 dB maps to a transmission index (SNR + 15)/30; band averages combine
/// through the octave weights and adjacent-band redundancy terms:
///   STI = sum_k alpha_k MTI_k - sum_k beta_k sqrt(MTI_k MTI_{k+1}).
inline double sti(const dsp::MtfMatrix& mtf, const StiWeights& weights = male_sti_weights()) {
  mtf.validate();
  std::array<double, kNumBands> mti{};
  for (std::size_t k = 0; k < kNumBands; ++k) {
    double acc = 0.0;
    for (std::size_t f = 0; f < dsp::kNumModulationFrequencies; ++f) {
      double m = mtf.m[k][f];
      double snr_db;
      if (m >= 1.0) {
        snr_db = 15.0;
      } else if (m <= 0.0) {
        snr_db = -15.0;
      } else {
        snr_db = std::clamp(10.0 * std::log10(m / (1.0 - m)), -15.0, 15.0);
      }
      acc += (snr_db + 15.0) / 30.0;
    }
    mti[k] = acc / static_cast<double>(dsp::kNumModulationFrequencies);
  }
  double value = 0.0;
  for (std::size_t k = 0; k < kNumBands; ++k) value += weights.alpha[k] * mti[k];
  for (std::size_t k = 0; k + 1 < kNumBands; ++k)
    value -= weights.beta[k] * std::sqrt(mti[k] * mti[k + 1]);
  return std::clamp(value, 0.0, 1.0);
}

/// Noise-free modulation transfer per band from per-band reverberation times
/// (closed form for exponential decays); bands without a known T carry m = 1.
inline dsp::MtfMatrix mtf_from_band_t30(
    const std::optional<std::array<double, kNumBands>>& t30_s) {
  dsp::MtfMatrix mtf;
  for (std::size_t k = 0; k < kNumBands; ++k)
    for (std::size_t f = 0; f < dsp::kNumModulationFrequencies; ++f)
      mtf.m[k][f] = (t30_s && (*t30_s)[k] > 0.0)
                        ? dsp::mtf_exponential(dsp::kModulationFrequenciesHz[f], (*t30_s)[k])
                        : 1.0;
  return mtf;
}

/// Apply the background-noise correction band by band.
inline dsp::MtfMatrix noise_corrected(const dsp::MtfMatrix& mtf,
                                      const std::array<double, kNumBands>& snr_db) {
  dsp::MtfMatrix out;
  for (std::size_t k = 0; k < kNumBands; ++k)
    for (std::size_t f = 0; f < dsp::kNumModulationFrequencies; ++f)
      out.m[k][f] = dsp::apply_noise_correction(mtf.m[k][f], snr_db[k]);
  return out;
}

}  // namespace opra::iso3382
