#pragma once

#include <string>

#include "opra/core/bands.hpp"

namespace opra::iso3382 {

enum class AnnexClass { good, poor, unclassified };

inline std::string to_string(AnnexClass c) {
  switch (c) {
    case AnnexClass::good: return "good";
    case AnnexClass::poor: return "poor";
    default: return "unclassified";
  }
}

/// Informative single-number quality thresholds. The defaults reproduce every
/// consistent flag of the bundled dataset; all six are overridable.
struct AnnexATable {
  double rd_good_max_m = 5.0;
  double rd_poor_min_m = 10.0;
  double d2s_good_min_db = 7.0;
  double d2s_poor_below_db = 5.0;   // poor strictly below this
  double lpas4m_good_max_db = 48.0;
  double lpas4m_poor_min_db = 50.0;
};

inline AnnexClass classify_annex_a(const std::string& metric_id, double value,
                                   const AnnexATable& table = {}) {
  if (metric_id == "rd") {
    if (value <= table.rd_good_max_m) return AnnexClass::good;
    if (value >= table.rd_poor_min_m) return AnnexClass::poor;
    return AnnexClass::unclassified;
  }
  if (metric_id == "d2s") {
    if (value >= table.d2s_good_min_db) return AnnexClass::good;
    if (value < table.d2s_poor_below_db) return AnnexClass::poor;
    return AnnexClass::unclassified;
  }
  if (metric_id == "lpas4m") {
    if (value <= table.lpas4m_good_max_db) return AnnexClass::good;
    if (value >= table.lpas4m_poor_min_db) return AnnexClass::poor;
    return AnnexClass::unclassified;
  }
  throw ValidationError("classify_annex_a: unknown metric '" + metric_id + "'");
}

}  // namespace opra::iso3382
