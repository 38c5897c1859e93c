#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "opra/core/measurement.hpp"
#include "opra/dsp/impulse_response.hpp"
#include "opra/dsp/mtf.hpp"
#include "opra/iso3382/constants.hpp"
#include "opra/stats/repeat.hpp"
#include "opra/stats/rng.hpp"

namespace opra::synth {

/// Closed-form description of a synthetic office path. Band levels follow
/// L_k(r) = ref_k - decay_k log2(r); reverberation and noise are constants.
struct SyntheticOfficeSpec {
  std::array<double, kNumBands> ref_level_db{};   // speech SPL at 1 m per band
  std::array<double, kNumBands> decay_db_per_doubling{};
  std::optional<OctaveBandSpectrum> noise;
  std::optional<std::array<double, kNumBands>> t30_s;
  std::vector<double> distances_m;
  double repeat_level_sd_db = 0.0;   // per-band level perturbation between runs
  double repeat_decay_sd_db = 0.0;   // per-band decay perturbation between runs
  std::uint64_t seed = 1;

  void validate() const {
    if (distances_m.size() < 2)
      throw ValidationError("SyntheticOfficeSpec: need at least 2 distances");
    double prev = 0.0;
    for (double d : distances_m) {
      if (!(d > prev))
        throw ValidationError("SyntheticOfficeSpec: distances must be strictly increasing");
      prev = d;
    }
    for (double v : decay_db_per_doubling)
      if (v < 0.0) throw ValidationError("SyntheticOfficeSpec: decay rates must be >= 0");
  }

  static SyntheticOfficeSpec flat_example() {
    SyntheticOfficeSpec spec;
    spec.ref_level_db.fill(60.0);
    spec.decay_db_per_doubling.fill(6.0);
    spec.noise = OctaveBandSpectrum::flat(60.0 - 6.0 * std::log2(8.0));  // crossing at 8 m
    spec.distances_m = {2.0, 3.0, 4.5, 6.5, 9.0};
    return spec;
  }
};

struct GroundTruth {
  double d2s_db = 0.0;
  double lpas4m_db = 0.0;
  std::optional<double> rd_m;       // absent: constructed profile never crosses 0.5
  std::optional<double> lpab_dba;
  std::optional<double> t30_mid_s;
};

namespace detail {
// The ground-truth chain below repeats the published formulas on purpose: it
// must stay independent of the metric pipeline it is used to check.

inline double a_sum(const std::array<double, kNumBands>& levels) {
  double acc = 0.0;
  for (std::size_t k = 0; k < kNumBands; ++k)
    acc += std::pow(10.0, (levels[k] + kAWeightDb[k]) / 10.0);
  return 10.0 * std::log10(acc);
}

inline double closed_form_sti(const SyntheticOfficeSpec& spec,
                              const std::array<double, kNumBands>& ref,
                              const std::array<double, kNumBands>& decay, double r) {
  const auto& weights = iso3382::male_sti_weights();
  std::array<double, kNumBands> mti{};
  for (std::size_t k = 0; k < kNumBands; ++k) {
    double acc = 0.0;
    for (std::size_t f = 0; f < dsp::kNumModulationFrequencies; ++f) {
      double m = 1.0;
      if (spec.t30_s && (*spec.t30_s)[k] > 0.0)
        m = dsp::mtf_exponential(dsp::kModulationFrequenciesHz[f], (*spec.t30_s)[k]);
      if (spec.noise) {
        double snr = ref[k] - decay[k] * std::log2(r) - spec.noise->at(k);
        m /= 1.0 + std::pow(10.0, -snr / 10.0);
      }
      double snr_eff = (m >= 1.0)   ? 15.0
                       : (m <= 0.0) ? -15.0
                                    : 10.0 * std::log10(m / (1.0 - m));
      snr_eff = std::max(-15.0, std::min(15.0, snr_eff));
      acc += (snr_eff + 15.0) / 30.0;
    }
    mti[k] = acc / static_cast<double>(dsp::kNumModulationFrequencies);
  }
  double value = 0.0;
  for (std::size_t k = 0; k < kNumBands; ++k) value += weights.alpha[k] * mti[k];
  for (std::size_t k = 0; k + 1 < kNumBands; ++k)
    value -= weights.beta[k] * std::sqrt(mti[k] * mti[k + 1]);
  return std::max(0.0, std::min(1.0, value));
}

struct Line {
  double slope, intercept;
};

inline Line ols_on_log2(const std::vector<double>& x_m, const std::vector<double>& y) {
  double n = static_cast<double>(x_m.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x_m.size(); ++i) {
    double x = std::log2(x_m[i]);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace detail

/// One synthetic measurement run plus its independently derived ground truth.
struct GeneratedPath {
  PathMeasurement run;
  GroundTruth truth;
};

inline GeneratedPath generate_path(const SyntheticOfficeSpec& spec, int run_index = 1,
                                   int office_id = 1, int path_id = 1) {
  spec.validate();
  std::array<double, kNumBands> ref = spec.ref_level_db;
  std::array<double, kNumBands> decay = spec.decay_db_per_doubling;
  if (run_index != 1 && (spec.repeat_level_sd_db > 0.0 || spec.repeat_decay_sd_db > 0.0)) {
    stats::SplitMix64 rng(spec.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(run_index)));
    for (std::size_t k = 0; k < kNumBands; ++k) {
      ref[k] += spec.repeat_level_sd_db * rng.next_normal();
      decay[k] = std::max(0.0, decay[k] + spec.repeat_decay_sd_db * rng.next_normal());
    }
  }

  GeneratedPath out;
  out.run.office_id = office_id;
  out.run.path_id = path_id;
  out.run.run_index = (run_index == 2) ? 2 : 1;
  out.run.direction = (run_index == 2) ? Direction::reverse : Direction::forward;
  out.run.source_power = iso3382::speech_spectrum_model();  // identity transposition
  for (double r : spec.distances_m) {
    ReceiverPoint point;
    point.distance_m = r;
    std::array<double, kNumBands> levels{};
    for (std::size_t k = 0; k < kNumBands; ++k) levels[k] = ref[k] - decay[k] * std::log2(r);
    point.spectrum = OctaveBandSpectrum(levels);
    point.noise = spec.noise;
    point.t30_s = spec.t30_s;
    out.run.receivers.push_back(std::move(point));
  }

  // Ground truth: A-level regression in closed form.
  std::vector<double> a_levels;
  for (double r : spec.distances_m) {
    std::array<double, kNumBands> levels{};
    for (std::size_t k = 0; k < kNumBands; ++k) levels[k] = ref[k] - decay[k] * std::log2(r);
    a_levels.push_back(detail::a_sum(levels));
  }
  auto line = detail::ols_on_log2(spec.distances_m, a_levels);
  out.truth.d2s_db = -line.slope;
  out.truth.lpas4m_db = line.intercept + 2.0 * line.slope;

  // Ground-truth distraction distance: the STI line fitted to the
  // closed-form receiver values, root-scanned for its 0.5 crossing.
  std::vector<double> sti_values;
  for (double r : spec.distances_m)
    sti_values.push_back(detail::closed_form_sti(spec, ref, decay, r));
  auto sti_line = detail::ols_on_log2(spec.distances_m, sti_values);
  if (sti_line.slope != 0.0) {
    double lo = 1e-3, hi = 1e6;
    auto at = [&](double r) { return sti_line.intercept + sti_line.slope * std::log2(r); };
    if ((at(lo) - 0.5) * (at(hi) - 0.5) < 0.0) {
      for (int i = 0; i < 200; ++i) {
        double mid = std::sqrt(lo * hi);  // bisect on the log axis
        ((at(mid) > 0.5) == (at(lo) > 0.5)) ? lo = mid : hi = mid;
      }
      out.truth.rd_m = std::sqrt(lo * hi);
    }
  }

  if (spec.noise) {
    std::array<double, kNumBands> noise_levels{};
    for (std::size_t k = 0; k < kNumBands; ++k) noise_levels[k] = spec.noise->at(k);
    out.truth.lpab_dba = detail::a_sum(noise_levels);
  }
  if (spec.t30_s) out.truth.t30_mid_s = 0.5 * ((*spec.t30_s)[2] + (*spec.t30_s)[3]);
  return out;
}

/// A repeated pair of the same path (run 2 re-drawn under the perturbation
/// model). Zero perturbation gives two identical runs.
inline std::pair<GeneratedPath, GeneratedPath> generate_repeat_pair(
    const SyntheticOfficeSpec& spec, int office_id = 1, int path_id = 1) {
  return {generate_path(spec, 1, office_id, path_id),
          generate_path(spec, 2, office_id, path_id)};
}

struct GeneratedIr {
  dsp::ImpulseResponse ir;
  bool short_warning = false;  // response shorter than 1.5 T
};

/// Gaussian noise under an exponential envelope that loses 60 dB of level
/// over `t_s`. Fully determined by the seed.
inline GeneratedIr generate_ir(double t_s, double sample_rate_hz, double length_s,
                               std::uint64_t seed) {
  if (!(t_s > 0.0)) throw ValidationError("generate_ir: T must be > 0");
  if (!(sample_rate_hz > 0.0) || !(length_s > 0.0))
    throw ValidationError("generate_ir: rate and length must be > 0");
  GeneratedIr out;
  out.ir.sample_rate_hz = sample_rate_hz;
  out.short_warning = length_s < 1.5 * t_s;
  double alpha = 6.907755278982137 / t_s;
  std::size_t n = static_cast<std::size_t>(std::round(length_s * sample_rate_hz));
  out.ir.samples.resize(n);
  stats::SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sample_rate_hz;
    out.ir.samples[i] = std::exp(-alpha * t) * rng.next_normal();
  }
  return out;
}

struct GeneratedStudy {
  std::vector<stats::RepeatGroup> groups;
  double sigma_b = 0.0;  // generative truth
  double sigma_w = 0.0;
};

/// Groups drawn from the two-level normal model: group means with spread
/// sigma_b around zero, observations with spread sigma_w around their mean.
inline GeneratedStudy generate_repeat_study(double sigma_b, double sigma_w,
                                            std::size_t n_groups, std::size_t k,
                                            std::uint64_t seed,
                                            const std::string& metric_id = "synthetic") {
  if (n_groups < 2 || k < 2)
    throw ValidationError("generate_repeat_study: need n_groups >= 2 and k >= 2");
  GeneratedStudy out;
  out.sigma_b = sigma_b;
  out.sigma_w = sigma_w;
  stats::SplitMix64 rng(seed);
  out.groups.reserve(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    stats::RepeatGroup group;
    group.group_id = "group " + std::to_string(g + 1);
    group.metric_id = metric_id;
    double mu = sigma_b * rng.next_normal();
    for (std::size_t i = 0; i < k; ++i) group.values.push_back(mu + sigma_w * rng.next_normal());
    out.groups.push_back(std::move(group));
  }
  return out;
}

}  // namespace opra::synth
