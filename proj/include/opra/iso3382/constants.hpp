#pragma once

#include <array>

#include "opra/core/bands.hpp"

namespace opra::iso3382 {

/// Nominal speech sound power at normal vocal effort, dB re 1 pW per octave
/// band (the genderless spectrum the open-plan standard prescribes for the
/// measurement source model; A-weighted total 57.4 dB).
inline constexpr std::array<double, kNumBands> kSpeechSoundPowerDb = {
    49.9, 54.3, 58.0, 52.0, 44.8, 38.8, 33.5};

inline OctaveBandSpectrum speech_spectrum_model() {
  return OctaveBandSpectrum(kSpeechSoundPowerDb);
}

/// Octave-band weights (alpha) and adjacent-band redundancy factors (beta)
/// for the speech transmission index, male talker set from the STI standard.
/// They satisfy sum(alpha) - sum(beta) = 1.
struct StiWeights {
  std::array<double, kNumBands> alpha;
  std::array<double, kNumBands - 1> beta;

  double alpha_sum() const {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s;
  }
  double beta_sum() const {
    double s = 0.0;
    for (double b : beta) s += b;
    return s;
  }
};

inline const StiWeights& male_sti_weights() {
  static const StiWeights weights = {
      {0.085, 0.127, 0.230, 0.233, 0.309, 0.224, 0.173},
      {0.085, 0.078, 0.065, 0.011, 0.047, 0.095}};
  return weights;
}

}  // namespace opra::iso3382
