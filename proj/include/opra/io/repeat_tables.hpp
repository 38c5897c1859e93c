#pragma once

#include <map>
#include <string>
#include <vector>

#include "opra/io/dataset.hpp"
#include "opra/stats/repeat.hpp"

namespace opra::data {

/// One observation in tidy form: office, path, run, metric, value.
struct TidyRow {
  int office = 0;
  int path = 0;
  int run = 0;
  std::string metric;
  double value = 0.0;
};

inline const std::vector<std::string>& repeated_metric_ids() {
  static const std::vector<std::string> ids = {"rd", "d2s", "lpas4m"};
  return ids;
}

inline double metric_value(const DatasetRow& row, const std::string& metric, int run) {
  if (run != 1 && run != 2) throw ValidationError("metric_value: run must be 1 or 2");
  int i = run - 1;
  if (metric == "rd") return row.rd_m[i];
  if (metric == "d2s") return row.d2s_db[i];
  if (metric == "lpas4m") return row.lpas4m_db[i];
  throw ValidationError("metric_value: unknown repeated metric '" + metric + "'");
}

inline std::vector<TidyRow> tidy_from_dataset(const StudyDataset& ds) {
  std::vector<TidyRow> rows;
  rows.reserve(ds.rows.size() * repeated_metric_ids().size() * 2);
  for (const auto& r : ds.rows)
    for (const auto& metric : repeated_metric_ids())
      for (int run : {1, 2})
        rows.push_back({r.office, r.path, run, metric, metric_value(r, metric, run)});
  return rows;
}

/// Same path, both directions: one group of k = 2 per path.
inline std::vector<stats::RepeatGroup> type1_groups(const StudyDataset& ds,
                                                    const std::string& metric) {
  std::vector<stats::RepeatGroup> groups;
  groups.reserve(ds.rows.size());
  for (const auto& r : ds.rows) {
    stats::RepeatGroup g;
    g.group_id = "path " + std::to_string(r.path);
    g.metric_id = metric;
    g.values = {metric_value(r, metric, 1), metric_value(r, metric, 2)};
    groups.push_back(std::move(g));
  }
  return groups;
}

/// Two retained paths per office, both directions each: k = 4 per office.
inline std::vector<stats::RepeatGroup> type2_groups(const StudyDataset& ds,
                                                    const std::string& metric) {
  std::vector<stats::RepeatGroup> groups;
  groups.reserve(ds.type2_offices.size());
  for (int office : ds.type2_offices) {
    const auto& pair = ds.type2_retained.at(office);
    stats::RepeatGroup g;
    g.group_id = "office " + std::to_string(office);
    g.metric_id = metric;
    for (int path : pair) {
      const auto& row = ds.row_for_path(path);
      g.values.push_back(metric_value(row, metric, 1));
      g.values.push_back(metric_value(row, metric, 2));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

inline std::vector<stats::DeltaRecord> deltas_of(const std::vector<stats::RepeatGroup>& groups) {
  std::vector<stats::DeltaRecord> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(stats::delta_range(g));
  return out;
}

/// Group assembly from arbitrary tidy rows (the `repeatability` command path).
/// Type1 groups: one per (office, path, metric) over runs. Type2 groups: one
/// per (office, metric) over the values of two retained paths; offices with
/// more than two measured paths keep the first two in path order unless an
/// override names the pair.
struct TidyGroups {
  std::map<std::string, std::vector<stats::RepeatGroup>> type1;  // metric -> groups
  std::map<std::string, std::vector<stats::RepeatGroup>> type2;
};

inline TidyGroups groups_from_tidy(const std::vector<TidyRow>& rows,
                                   const std::map<int, std::array<int, 2>>& retention = {}) {
  TidyGroups out;
  std::map<std::string, std::map<std::pair<int, int>, std::vector<double>>> by_path;
  std::map<std::string, std::map<int, std::map<int, std::vector<double>>>> by_office;
  for (const auto& r : rows) {
    by_path[r.metric][{r.office, r.path}].push_back(r.value);
    by_office[r.metric][r.office][r.path].push_back(r.value);
  }
  for (auto& [metric, paths] : by_path) {
    for (auto& [key, values] : paths) {
      if (values.size() < 2) continue;  // unpaired measurement: no repeat group
      stats::RepeatGroup g;
      g.group_id = "path " + std::to_string(key.second);
      g.metric_id = metric;
      g.values = values;
      out.type1[metric].push_back(std::move(g));
    }
  }
  for (auto& [metric, offices] : by_office) {
    for (auto& [office, paths] : offices) {
      if (paths.size() < 2) continue;
      std::vector<int> path_ids;
      for (const auto& [pid, _] : paths) path_ids.push_back(pid);
      std::array<int, 2> retained = {path_ids[0], path_ids[1]};
      auto it = retention.find(office);
      if (it != retention.end()) retained = it->second;
      stats::RepeatGroup g;
      g.group_id = "office " + std::to_string(office);
      g.metric_id = metric;
      for (int pid : retained) {
        auto pit = paths.find(pid);
        if (pit == paths.end())
          throw ValidationError("type2 retention names path " + std::to_string(pid) +
                                " absent from office " + std::to_string(office));
        for (double v : pit->second) g.values.push_back(v);
      }
      out.type2[metric].push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace opra::data
