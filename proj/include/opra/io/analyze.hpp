#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "opra/io/session.hpp"
#include "opra/iso3382/classify.hpp"
#include "opra/iso3382/noise_gain.hpp"

namespace opra::io {

struct AnalyzeOptions {
  iso3382::MetricOptions metrics;
  bool adjust_noise = true;  // office-level uniform gain when rd falls outside its window
  iso3382::GainSearchOptions gain_search;
};

struct AnalyzedRun {
  int office_id = 0;
  int path_id = 0;
  int run_index = 1;
  Direction direction = Direction::forward;
  std::size_t receivers = 0;
  MetricSet metrics;
  iso3382::AnnexClass d2s_class = iso3382::AnnexClass::unclassified;
  iso3382::AnnexClass lpas4m_class = iso3382::AnnexClass::unclassified;
  iso3382::AnnexClass rd_class = iso3382::AnnexClass::unclassified;
};

struct AnalysisResult {
  std::vector<AnalyzedRun> runs;
  double noise_gain_db = 0.0;
  std::vector<std::string> warnings;
};

/// Compute the metric set of every run in a loaded session. When a
/// distraction distance falls outside its validity window and noise data is
/// present, the office-level uniform gain search is attempted; an office that
/// cannot be made valid keeps its flags and gains a warning instead of failing.
inline AnalysisResult analyze_session(const LoadedSession& session,
                                      const AnalyzeOptions& options = {}) {
  AnalysisResult result;
  result.warnings = session.warnings;

  std::vector<PathMeasurement> runs;
  std::vector<std::vector<dsp::MtfMatrix>> mtfs;
  bool any_mtf = false;
  for (const auto& loaded : session.runs) {
    runs.push_back(loaded.run);
    mtfs.push_back(loaded.mtfs);
    if (!loaded.mtfs.empty()) any_mtf = true;
  }
  if (!any_mtf) mtfs.clear();
  if (any_mtf)
    for (auto& m : mtfs)
      if (m.empty())
        throw ValidationError("analyze_session: mixed recorded and level-only runs "
                              "in one session are not supported");

  std::vector<MetricSet> metric_sets;
  double gain = 0.0;
  bool needs_adjustment = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    MetricSet m = mtfs.empty() ? iso3382::compute_metric_set(runs[i], options.metrics)
                               : iso3382::compute_metric_set(runs[i], options.metrics, mtfs[i]);
    if (!m.rd_m || !m.rd_valid) needs_adjustment = true;
    metric_sets.push_back(std::move(m));
  }
  if (needs_adjustment && options.adjust_noise) {
    try {
      auto adjusted =
          iso3382::adjust_background_gain(runs, options.metrics, options.gain_search, mtfs);
      gain = adjusted.gain_db;
      metric_sets = std::move(adjusted.metrics);
    } catch (const iso3382::GainSearchError& e) {
      result.warnings.push_back(e.what());
    }
  }

  result.noise_gain_db = gain;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    AnalyzedRun row;
    row.office_id = runs[i].office_id;
    row.path_id = runs[i].path_id;
    row.run_index = runs[i].run_index;
    row.direction = runs[i].direction;
    row.receivers = runs[i].receivers.size();
    row.metrics = metric_sets[i];
    row.d2s_class = iso3382::classify_annex_a("d2s", row.metrics.d2s_db, options.metrics.annex_a);
    row.lpas4m_class =
        iso3382::classify_annex_a("lpas4m", row.metrics.lpas4m_db, options.metrics.annex_a);
    if (row.metrics.rd_m)
      row.rd_class = iso3382::classify_annex_a("rd", *row.metrics.rd_m, options.metrics.annex_a);
    result.runs.push_back(std::move(row));
  }
  return result;
}

inline std::string analysis_tsv(const AnalysisResult& result) {
  std::ostringstream out;
  for (const auto& w : result.warnings) out << "# warning: " << w << "\n";
  char gain[32];
  std::snprintf(gain, sizeof(gain), "%.2f", result.noise_gain_db);
  out << "# noise_gain_db: " << gain << "\n";
  out << "office\tpath\trun\tdirection\treceivers\td2s_db\td2s_class\tlpas4m_db\tlpas4m_class"
         "\trd_m\trd_valid\trd_class\tlpab_dba\tt30_mid_s\tfit_r2_speech\tfit_r2_sti"
         "\tlpas4m_extrapolated\n";
  for (const auto& r : result.runs) {
    char line[512];
    std::string rd = r.metrics.rd_m ? [](double v) {
      char b[32];
      std::snprintf(b, sizeof(b), "%.3f", v);
      return std::string(b);
    }(*r.metrics.rd_m)
                                    : "undefined";
    std::string lpab = r.metrics.lpab_dba ? [](double v) {
      char b[32];
      std::snprintf(b, sizeof(b), "%.2f", v);
      return std::string(b);
    }(*r.metrics.lpab_dba)
                                          : "-";
    std::string t30 = r.metrics.t30_mid_s ? [](double v) {
      char b[32];
      std::snprintf(b, sizeof(b), "%.3f", v);
      return std::string(b);
    }(*r.metrics.t30_mid_s)
                                          : "-";
    std::snprintf(line, sizeof(line),
                  "%d\t%d\t%d\t%s\t%zu\t%.3f\t%s\t%.3f\t%s\t%s\t%s\t%s\t%s\t%s\t%.4f\t%.4f\t%s\n",
                  r.office_id, r.path_id, r.run_index, to_string(r.direction).c_str(),
                  r.receivers, r.metrics.d2s_db, iso3382::to_string(r.d2s_class).c_str(),
                  r.metrics.lpas4m_db, iso3382::to_string(r.lpas4m_class).c_str(), rd.c_str(),
                  r.metrics.rd_valid ? "yes" : "no",
                  r.metrics.rd_m ? iso3382::to_string(r.rd_class).c_str() : "-", lpab.c_str(),
                  t30.c_str(), r.metrics.fit_r2_speech, r.metrics.fit_r2_sti,
                  r.metrics.lpas4m_extrapolated ? "yes" : "no");
    out << line;
  }
  return out.str();
}

inline json analysis_json(const AnalysisResult& result) {
  json j;
  j["noise_gain_db"] = result.noise_gain_db;
  j["warnings"] = result.warnings;
  j["runs"] = json::array();
  for (const auto& r : result.runs) {
    json row;
    row["office"] = r.office_id;
    row["path"] = r.path_id;
    row["run"] = r.run_index;
    row["direction"] = to_string(r.direction);
    row["receivers"] = r.receivers;
    row["d2s_db"] = r.metrics.d2s_db;
    row["d2s_class"] = iso3382::to_string(r.d2s_class);
    row["lpas4m_db"] = r.metrics.lpas4m_db;
    row["lpas4m_class"] = iso3382::to_string(r.lpas4m_class);
    if (r.metrics.rd_m) {
      row["rd_m"] = *r.metrics.rd_m;
      row["rd_class"] = iso3382::to_string(r.rd_class);
    } else {
      row["rd_m"] = nullptr;
    }
    row["rd_valid"] = r.metrics.rd_valid;
    if (r.metrics.lpab_dba) row["lpab_dba"] = *r.metrics.lpab_dba;
    if (r.metrics.t30_mid_s) row["t30_mid_s"] = *r.metrics.t30_mid_s;
    row["fit_r2_speech"] = r.metrics.fit_r2_speech;
    row["fit_r2_sti"] = r.metrics.fit_r2_sti;
    row["lpas4m_extrapolated"] = r.metrics.lpas4m_extrapolated;
    j["runs"].push_back(std::move(row));
  }
  return j;
}

}  // namespace opra::io
