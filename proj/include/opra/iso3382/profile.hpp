#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "opra/core/bands.hpp"
#include "opra/iso3382/spatial_decay.hpp"

namespace opra::iso3382 {

/// Distance axis used when regressing STI against receiver position.
enum class Abscissa { log2_distance, linear_distance };

struct StiPoint {
  double distance_m = 0.0;
  double sti = 0.0;
};

struct StiProfile {
  std::vector<StiPoint> points;
  double slope = 0.0;           // per abscissa unit
  double intercept = 0.0;
  double r_squared = 0.0;
  std::optional<double> rd_m;   // absent: the fitted line never crosses 0.5
  bool rd_valid = false;
  double applied_noise_gain_db = 0.0;
  Abscissa abscissa = Abscissa::log2_distance;
};

/// The distraction distance is accepted only inside the measured distance
/// span extended by 10% on either end.
inline bool validate_rd(double rd_m, const std::vector<double>& distances_m) {
  if (distances_m.empty()) throw ValidationError("validate_rd: no distances");
  double lo = distances_m.front(), hi = distances_m.front();
  for (double d : distances_m) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return rd_m >= 0.9 * lo && rd_m <= 1.1 * hi;
}

/// Regress STI against distance (log2 by default) and read the distraction
/// distance off the fitted line where it crosses STI = 0.5. A line that
/// never crosses (zero slope, or a crossing outside the representable range)
/// leaves rd undefined rather than guessed.
inline StiProfile sti_profile_and_rd(const std::vector<StiPoint>& points,
                                     Abscissa abscissa = Abscissa::log2_distance) {
  if (points.size() < 2)
    throw ValidationError("sti_profile_and_rd: need at least 2 points");
  StiProfile profile;
  profile.points = points;
  profile.abscissa = abscissa;

  std::vector<DistanceLevel> mapped;  // reuse the OLS core on (x, sti)
  mapped.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.distance_m > 0.0))
      throw ValidationError("sti_profile_and_rd: distances must be > 0");
    double x = (abscissa == Abscissa::log2_distance) ? std::log2(p.distance_m) : p.distance_m;
    mapped.push_back({std::exp2(x), p.sti});
  }
  // fit_spatial_decay works on log2(distance); for the linear axis, feed
  // 2^d so its internal log2 recovers d.
  auto fit = fit_spatial_decay(mapped);
  profile.slope = fit.fit.slope;
  profile.intercept = fit.fit.intercept;
  profile.r_squared = fit.fit.r_squared;

  if (profile.slope != 0.0) {
    double x_cross = (0.5 - profile.intercept) / profile.slope;
    double rd = (abscissa == Abscissa::log2_distance) ? std::exp2(x_cross) : x_cross;
    if (std::isfinite(rd) && rd > 0.0) profile.rd_m = rd;
  }
  std::vector<double> distances;
  distances.reserve(points.size());
  for (const auto& p : points) distances.push_back(p.distance_m);
  profile.rd_valid = profile.rd_m && validate_rd(*profile.rd_m, distances);
  return profile;
}

}  // namespace opra::iso3382
