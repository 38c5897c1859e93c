#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace opra {

/// Error raised when an input violates a documented precondition.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNumBands = 7;

/// Nominal octave-band centre frequencies, Hz.
inline constexpr std::array<double, kNumBands> kBandCentersHz = {
    125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0};

/// A-weighting at the octave centres (IEC 61672-1), dB.
inline constexpr std::array<double, kNumBands> kAWeightDb = {
    -16.1, -8.6, -3.2, 0.0, 1.2, 1.0, -1.1};

inline std::size_t band_index(double center_hz) {
  for (std::size_t k = 0; k < kNumBands; ++k) {
    if (std::abs(kBandCentersHz[k] - center_hz) < 1e-9) return k;
  }
  throw ValidationError("not an octave-band centre: " + std::to_string(center_hz) + " Hz");
}

/// Seven octave-band levels in dB. A band is either present (finite value, or
/// -inf meaning "no energy") or explicitly absent. Absent is never a default
/// level: operations that need the band fail loudly instead of assuming one.
class OctaveBandSpectrum {
public:
  OctaveBandSpectrum() : levels_{}, present_{} { present_.fill(false); }

  explicit OctaveBandSpectrum(const std::array<double, kNumBands>& levels_db)
      : levels_(levels_db) {
    present_.fill(true);
    for (std::size_t k = 0; k < kNumBands; ++k) check_level(levels_[k], k);
  }

  static OctaveBandSpectrum flat(double level_db) {
    std::array<double, kNumBands> v{};
    v.fill(level_db);
    return OctaveBandSpectrum(v);
  }

  double at(std::size_t band) const {
    require_band(band);
    if (!present_[band])
      throw ValidationError("band " + band_name(band) + " is absent");
    return levels_[band];
  }

  bool has(std::size_t band) const {
    require_band(band);
    return present_[band];
  }

  bool complete() const {
    for (bool p : present_)
      if (!p) return false;
    return true;
  }

  void set(std::size_t band, double level_db) {
    require_band(band);
    check_level(level_db, band);
    levels_[band] = level_db;
    present_[band] = true;
  }

  void set_absent(std::size_t band) {
    require_band(band);
    present_[band] = false;
    levels_[band] = 0.0;
  }

  /// First absent band, or kNumBands when complete.
  std::size_t first_absent() const {
    for (std::size_t k = 0; k < kNumBands; ++k)
      if (!present_[k]) return k;
    return kNumBands;
  }

  OctaveBandSpectrum plus(double gain_db) const {
    OctaveBandSpectrum out = *this;
    for (std::size_t k = 0; k < kNumBands; ++k)
      if (out.present_[k]) out.levels_[k] += gain_db;
    return out;
  }

  static std::string band_name(std::size_t band) {
    static const std::array<const char*, kNumBands> names = {
        "125 Hz", "250 Hz", "500 Hz", "1 kHz", "2 kHz", "4 kHz", "8 kHz"};
    return names.at(band);
  }

  friend bool operator==(const OctaveBandSpectrum& a, const OctaveBandSpectrum& b) {
    for (std::size_t k = 0; k < kNumBands; ++k) {
      if (a.present_[k] != b.present_[k]) return false;
      if (a.present_[k] && a.levels_[k] != b.levels_[k]) return false;
    }
    return true;
  }

private:
  static void require_band(std::size_t band) {
    if (band >= kNumBands) throw ValidationError("band index out of range");
  }
  static void check_level(double level_db, std::size_t band) {
    // -inf is a legal "zero energy" level; NaN and +inf never are.
    if (std::isnan(level_db) || level_db == std::numeric_limits<double>::infinity())
      throw ValidationError("invalid level in band " + band_name(band));
  }

  std::array<double, kNumBands> levels_;
  std::array<bool, kNumBands> present_;
};

inline double db_to_power(double level_db) {
  return std::pow(10.0, level_db / 10.0);
}

inline double power_to_db(double power) {
  return 10.0 * std::log10(power);
}

/// A-weighted level of a complete spectrum:
/// 10*log10(sum_k 10^((L_k + A_k)/10)).
inline double a_weighted_sum(const OctaveBandSpectrum& spectrum) {
  if (!spectrum.complete())
    throw ValidationError("a_weighted_sum: band " +
                          OctaveBandSpectrum::band_name(spectrum.first_absent()) +
                          " is absent");
  double acc = 0.0;
  for (std::size_t k = 0; k < kNumBands; ++k)
    acc += db_to_power(spectrum.at(k) + kAWeightDb[k]);
  return power_to_db(acc);
}

/// Energetic (power) mean of levels: 10*log10(mean(10^(L/10))).
inline double energetic_mean(std::span<const double> levels_db) {
  if (levels_db.empty()) throw ValidationError("energetic_mean: empty input");
  double acc = 0.0;
  for (double level : levels_db) {
    if (std::isnan(level)) throw ValidationError("energetic_mean: NaN level");
    acc += db_to_power(level);
  }
  return power_to_db(acc / static_cast<double>(levels_db.size()));
}

inline double energetic_mean(const std::vector<double>& levels_db) {
  return energetic_mean(std::span<const double>(levels_db));
}

/// Per-band signal-to-noise ratio, dB.
inline std::array<double, kNumBands> band_snr(const OctaveBandSpectrum& signal,
                                              const OctaveBandSpectrum& noise) {
  if (!signal.complete())
    throw ValidationError("band_snr: signal band " +
                          OctaveBandSpectrum::band_name(signal.first_absent()) + " is absent");
  if (!noise.complete())
    throw ValidationError("band_snr: noise band " +
                          OctaveBandSpectrum::band_name(noise.first_absent()) + " is absent");
  std::array<double, kNumBands> snr{};
  for (std::size_t k = 0; k < kNumBands; ++k) snr[k] = signal.at(k) - noise.at(k);
  return snr;
}

/// Band-wise energetic mean over several spectra (all bands required).
inline OctaveBandSpectrum energetic_mean_spectrum(
    const std::vector<OctaveBandSpectrum>& spectra) {
  if (spectra.empty()) throw ValidationError("energetic_mean_spectrum: empty input");
  std::array<double, kNumBands> out{};
  for (std::size_t k = 0; k < kNumBands; ++k) {
    std::vector<double> levels;
    levels.reserve(spectra.size());
    for (const auto& s : spectra) levels.push_back(s.at(k));
    out[k] = energetic_mean(levels);
  }
  return OctaveBandSpectrum(out);
}

}  // namespace opra
