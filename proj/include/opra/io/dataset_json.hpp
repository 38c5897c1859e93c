#pragma once

#include <json.hpp>

#include "opra/io/dataset.hpp"

namespace opra::data {

using json = nlohmann::ordered_json;

inline json dataset_to_json(const StudyDataset& ds) {
  json j;
  j["rows"] = json::array();
  for (const auto& r : ds.rows) {
    json row;
    row["building"] = std::string(1, r.building);
    row["office"] = r.office;
    row["path"] = r.path;
    row["t30_mid_s"] = r.t30_mid_s;
    row["lpab_dba"] = r.lpab_dba;
    auto flag = [](AnnexFlag f) { return std::string(1, flag_char(f)); };
    row["rd_m"] = {r.rd_m[0], r.rd_m[1]};
    row["rd_flag"] = {flag(r.rd_flag[0]), flag(r.rd_flag[1])};
    row["d2s_db"] = {r.d2s_db[0], r.d2s_db[1]};
    row["d2s_flag"] = {flag(r.d2s_flag[0]), flag(r.d2s_flag[1])};
    row["lpas4m_db"] = {r.lpas4m_db[0], r.lpas4m_db[1]};
    row["lpas4m_flag"] = {flag(r.lpas4m_flag[0]), flag(r.lpas4m_flag[1])};
    j["rows"].push_back(std::move(row));
  }
  j["offices"] = json::array();
  for (const auto& o : ds.offices) {
    json office;
    office["building"] = std::string(1, o.building);
    office["office"] = o.office;
    office["paths"] = o.paths;
    office["length_m"] = o.length_m;
    office["width_m"] = o.width_m;
    office["workstations_per_100m2"] = o.workstations_per_100m2;
    office["ceiling"] = o.ceiling;
    office["floor_type"] = o.floor_type;
    office["partitions"] = o.partitions;
    j["offices"].push_back(std::move(office));
  }
  j["type2_offices"] = ds.type2_offices;
  j["type2_retained"] = json::object();
  for (const auto& [office, pair] : ds.type2_retained)
    j["type2_retained"][std::to_string(office)] = {pair[0], pair[1]};
  j["normalizations"] = json::array();
  for (const auto& n : ds.normalizations)
    j["normalizations"].push_back(
        {{"cell", n.cell}, {"raw", n.raw}, {"normalized", n.normalized}, {"reason", n.reason}});
  return j;
}

inline StudyDataset dataset_from_json(const json& j) {
  StudyDataset ds;
  auto flag = [](const json& cell) { return flag_from_char(cell.get<std::string>()[0]); };
  for (const auto& row : j.at("rows")) {
    DatasetRow r;
    r.building = row.at("building").get<std::string>()[0];
    r.office = row.at("office").get<int>();
    r.path = row.at("path").get<int>();
    r.t30_mid_s = row.at("t30_mid_s").get<double>();
    r.lpab_dba = row.at("lpab_dba").get<double>();
    for (int i = 0; i < 2; ++i) {
      r.rd_m[i] = row.at("rd_m")[i].get<double>();
      r.rd_flag[i] = flag(row.at("rd_flag")[i]);
      r.d2s_db[i] = row.at("d2s_db")[i].get<double>();
      r.d2s_flag[i] = flag(row.at("d2s_flag")[i]);
      r.lpas4m_db[i] = row.at("lpas4m_db")[i].get<double>();
      r.lpas4m_flag[i] = flag(row.at("lpas4m_flag")[i]);
    }
    ds.rows.push_back(r);
  }
  for (const auto& office : j.at("offices")) {
    OfficeInfo o;
    o.building = office.at("building").get<std::string>()[0];
    o.office = office.at("office").get<int>();
    o.paths = office.at("paths").get<std::vector<int>>();
    o.length_m = office.at("length_m").get<double>();
    o.width_m = office.at("width_m").get<double>();
    o.workstations_per_100m2 = office.at("workstations_per_100m2").get<double>();
    o.ceiling = office.at("ceiling").get<std::string>();
    o.floor_type = office.at("floor_type").get<std::string>();
    o.partitions = office.at("partitions").get<std::string>();
    ds.offices.push_back(std::move(o));
    ds.office_paths[ds.offices.back().office] = ds.offices.back().paths;
  }
  ds.type2_offices = j.at("type2_offices").get<std::vector<int>>();
  for (const auto& [key, value] : j.at("type2_retained").items())
    ds.type2_retained[std::stoi(key)] = {value[0].get<int>(), value[1].get<int>()};
  for (const auto& n : j.at("normalizations"))
    ds.normalizations.push_back({n.at("cell").get<std::string>(), n.at("raw").get<std::string>(),
                                 n.at("normalized").get<std::string>(),
                                 n.at("reason").get<std::string>()});
  return ds;
}

inline bool dataset_equal(const StudyDataset& a, const StudyDataset& b) {
  return dataset_to_json(a) == dataset_to_json(b);
}

}  // namespace opra::data
