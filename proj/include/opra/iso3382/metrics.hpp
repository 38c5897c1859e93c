#pragma once

#include <optional>
#include <vector>

#include "opra/core/measurement.hpp"
#include "opra/dsp/schroeder.hpp"
#include "opra/iso3382/classify.hpp"
#include "opra/iso3382/profile.hpp"
#include "opra/iso3382/spatial_decay.hpp"
#include "opra/iso3382/sti.hpp"

namespace opra::iso3382 {

/// A-weighted background level: band-wise energetic average over the path's
/// receivers, then the A-weighted sum of that averaged spectrum.
inline double lp_a_b(const std::vector<OctaveBandSpectrum>& noise_spectra) {
  return a_weighted_sum(energetic_mean_spectrum(noise_spectra));
}

struct MetricOptions {
  Abscissa abscissa = Abscissa::log2_distance;
  StiWeights sti_weights = male_sti_weights();
  OctaveBandSpectrum speech_model = speech_spectrum_model();
  ReceiverBounds receiver_bounds;
  AnnexATable annex_a;
  /// Uniform gain added to every band of every receiver's noise spectrum
  /// (the office-level adjustment; see adjust_background_gain).
  double noise_gain_db = 0.0;
};

/// STI of one receiver: the reverberation-limited modulation transfer (from a
/// measured matrix when available, else the closed form over the receiver's
/// per-band T30, else flat 1) corrected for the band SNR when noise is known.
inline double receiver_sti(const ReceiverPoint& receiver,
                           const OctaveBandSpectrum& speech_at_receiver,
                           const MetricOptions& options,
                           const dsp::MtfMatrix* measured_mtf = nullptr) {
  dsp::MtfMatrix mtf =
      measured_mtf ? *measured_mtf : mtf_from_band_t30(receiver.t30_s);
  if (receiver.noise) {
    auto snr = band_snr(speech_at_receiver, receiver.noise->plus(options.noise_gain_db));
    mtf = noise_corrected(mtf, snr);
  }
  return sti(mtf, options.sti_weights);
}

/// Full metric set for one measurement run. The optional per-receiver MTF
/// matrices come from impulse-response analysis; runs described by band
/// levels alone fall back to the closed-form reverberation route. A run with
/// an undefined distraction distance still yields every other metric.
inline MetricSet compute_metric_set(const PathMeasurement& run, const MetricOptions& options = {},
                                    const std::vector<dsp::MtfMatrix>& per_receiver_mtf = {}) {
  run.validate(options.receiver_bounds);
  if (!per_receiver_mtf.empty() && per_receiver_mtf.size() != run.receivers.size())
    throw ValidationError(run.context() + ": MTF count does not match receiver count");

  std::vector<DistanceLevel> speech_levels;
  std::vector<StiPoint> sti_points;
  std::vector<OctaveBandSpectrum> noise_spectra;
  std::vector<dsp::ReceiverT30> t30s;
  speech_levels.reserve(run.receivers.size());
  for (std::size_t i = 0; i < run.receivers.size(); ++i) {
    const auto& receiver = run.receivers[i];
    OctaveBandSpectrum speech;
    try {
      speech = speech_level_at_receiver(receiver.spectrum, run.source_power,
                                        options.speech_model);
    } catch (const ValidationError& e) {
      throw ValidationError(run.context() + " receiver " + std::to_string(i + 1) + ": " +
                            e.what());
    }
    speech_levels.push_back({receiver.distance_m, a_weighted_sum(speech)});
    const dsp::MtfMatrix* mtf = per_receiver_mtf.empty() ? nullptr : &per_receiver_mtf[i];
    sti_points.push_back({receiver.distance_m, receiver_sti(receiver, speech, options, mtf)});
    if (receiver.noise) noise_spectra.push_back(*receiver.noise);
    if (receiver.t30_s) {
      // 500 Hz and 1 kHz are bands 2 and 3; non-positive entries mean unknown
      dsp::ReceiverT30 t;
      if ((*receiver.t30_s)[2] > 0.0) t.t500_s = (*receiver.t30_s)[2];
      if ((*receiver.t30_s)[3] > 0.0) t.t1000_s = (*receiver.t30_s)[3];
      if (t.t500_s || t.t1000_s) t30s.push_back(t);
    }
  }

  MetricSet metrics;
  auto decay = fit_spatial_decay(speech_levels);
  metrics.d2s_db = decay.d2s_db;
  metrics.lpas4m_db = decay.lpas4m_db;
  metrics.fit_r2_speech = decay.fit.r_squared;
  metrics.lpas4m_extrapolated = decay.extrapolated_at_4m;

  auto profile = sti_profile_and_rd(sti_points, options.abscissa);
  metrics.rd_m = profile.rd_m;
  metrics.rd_valid = profile.rd_valid;
  metrics.fit_r2_sti = profile.r_squared;
  metrics.noise_gain_db = options.noise_gain_db;

  if (!noise_spectra.empty()) metrics.lpab_dba = lp_a_b(noise_spectra);
  bool has_mid = false;
  for (const auto& t : t30s)
    if (t.t500_s && t.t1000_s) has_mid = true;
  if (has_mid) metrics.t30_mid_s = dsp::t30_mid(t30s);

  metrics.check_invariants();
  return metrics;
}

}  // namespace opra::iso3382
