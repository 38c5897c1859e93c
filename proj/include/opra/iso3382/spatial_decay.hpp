#pragma once

#include <cmath>
#include <vector>

#include "opra/core/bands.hpp"
#include "opra/iso3382/constants.hpp"

namespace opra::iso3382 {

/// Transpose a measured spectrum onto the nominal speech source: what the
/// receiver would see if the standard speech spectrum replaced the actual
/// source, band by band:
///   L_speech,k = L_measured,k - L_W,source,k + L_W,speech,k.
inline OctaveBandSpectrum speech_level_at_receiver(
    const OctaveBandSpectrum& measured, const OctaveBandSpectrum& source_power,
    const OctaveBandSpectrum& speech_model = speech_spectrum_model()) {
  OctaveBandSpectrum out;
  for (std::size_t k = 0; k < kNumBands; ++k)
    out.set(k, measured.at(k) - source_power.at(k) + speech_model.at(k));
  return out;
}

struct SpatialDecayFit {
  double slope = 0.0;      // dB per doubling of distance (regression on log2 r)
  double intercept = 0.0;  // level at 1 m (log2 r = 0)
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

struct DistanceLevel {
  double distance_m = 0.0;
  double level_db = 0.0;
};

struct SpatialDecayResult {
  SpatialDecayFit fit;
  double d2s_db = 0.0;
  double lpas4m_db = 0.0;
  bool extrapolated_at_4m = false;
};

/// Ordinary least squares of level against log2(distance). The decay rate per
/// distance doubling is minus the slope; the 4 m level is read from the line
/// whether or not 4 m lies inside the measured span (flagged when it does not).
inline SpatialDecayResult fit_spatial_decay(const std::vector<DistanceLevel>& points) {
  if (points.size() < 2)
    throw ValidationError("fit_spatial_decay: need at least 2 points");
  double min_d = points.front().distance_m, max_d = points.front().distance_m;
  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    if (!(p.distance_m > 0.0))
      throw ValidationError("fit_spatial_decay: distances must be > 0");
    min_d = std::min(min_d, p.distance_m);
    max_d = std::max(max_d, p.distance_m);
    sx += std::log2(p.distance_m);
    sy += p.level_db;
  }
  if (min_d == max_d)
    throw ValidationError("fit_spatial_decay: all distances equal");
  double n = static_cast<double>(points.size());
  double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    double dx = std::log2(p.distance_m) - mx;
    double dy = p.level_db - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  SpatialDecayResult out;
  out.fit.slope = sxy / sxx;
  out.fit.intercept = my - out.fit.slope * mx;
  out.fit.r_squared = (syy > 0.0) ? std::min(1.0, (sxy * sxy) / (sxx * syy)) : 1.0;
  out.fit.n_points = points.size();
  out.d2s_db = -out.fit.slope;
  out.lpas4m_db = out.fit.intercept + out.fit.slope * 2.0;  // log2(4) = 2
  out.extrapolated_at_4m = (4.0 < min_d || 4.0 > max_d);
  return out;
}

}  // namespace opra::iso3382
