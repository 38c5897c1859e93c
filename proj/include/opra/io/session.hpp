#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opra/core/measurement.hpp"
#include "opra/dsp/deconvolve.hpp"
#include "opra/dsp/mtf.hpp"
#include "opra/dsp/octave_filter.hpp"
#include "opra/dsp/schroeder.hpp"
#include "opra/io/wav.hpp"

namespace opra::io {

using json = nlohmann::ordered_json;

/// One receiver position as described by a session manifest: either inline
/// octave-band levels or a reference to a sweep recording (plus an optional
/// noise recording), never silently both absent.
struct SessionReceiver {
  double distance_m = 0.0;
  std::string id;
  std::optional<std::array<double, kNumBands>> speech_spl_db;
  std::optional<std::array<double, kNumBands>> noise_spl_db;
  std::optional<std::array<double, kNumBands>> t30_s;
  std::optional<std::string> recording;
  int recording_channel = 0;
  std::optional<std::string> noise_recording;
  int noise_channel = 0;
};

struct SessionRun {
  int path_id = 0;
  int run_index = 1;
  Direction direction = Direction::forward;
  std::vector<SessionReceiver> receivers;
};

struct SessionManifest {
  int office_id = 0;
  std::string building;
  double length_m = 0.0;
  double width_m = 0.0;
  double workstations_per_100m2 = 0.0;
  std::array<double, kNumBands> source_power_db{};
  double calibration_offset_db = 0.0;
  double noise_cal_db = 94.0;  // band SPL of a full-scale noise signal
  std::optional<dsp::SweepSpec> sweep;
  std::optional<double> sample_rate_hz;
  std::vector<SessionRun> runs;
};

namespace detail {

inline std::array<double, kNumBands> band_array(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != kNumBands)
    throw ValidationError(where + ": expected an array of " + std::to_string(kNumBands) +
                          " band levels");
  std::array<double, kNumBands> out{};
  for (std::size_t k = 0; k < kNumBands; ++k) {
    if (!j[k].is_number()) throw ValidationError(where + "[" + std::to_string(k) + "]: not a number");
    out[k] = j[k].get<double>();
  }
  return out;
}

}  // namespace detail

inline SessionManifest parse_session(const json& j) {
  SessionManifest m;
  try {
    if (j.contains("office")) {
      const auto& office = j.at("office");
      m.office_id = office.value("id", 0);
      m.building = office.value("building", std::string());
      m.length_m = office.value("length_m", 0.0);
      m.width_m = office.value("width_m", 0.0);
      m.workstations_per_100m2 = office.value("workstations_per_100m2", 0.0);
    }
    const auto& cal = j.at("calibration");
    m.source_power_db = detail::band_array(cal.at("source_power_db"), "calibration.source_power_db");
    m.calibration_offset_db = cal.value("offset_db", 0.0);
    m.noise_cal_db = cal.value("noise_cal_db", 94.0);
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      dsp::SweepSpec spec;
      spec.f_start_hz = s.at("f_start_hz").get<double>();
      spec.f_end_hz = s.at("f_end_hz").get<double>();
      spec.duration_s = s.at("duration_s").get<double>();
      m.sweep = spec;
      if (s.contains("sample_rate_hz")) m.sample_rate_hz = s.at("sample_rate_hz").get<double>();
    }
    if (!j.contains("paths") || !j.at("paths").is_array() || j.at("paths").empty())
      throw ValidationError("manifest: no paths");
    std::map<std::pair<int, int>, bool> seen;
    for (std::size_t p = 0; p < j.at("paths").size(); ++p) {
      const auto& jp = j.at("paths")[p];
      std::string at_path = "paths[" + std::to_string(p) + "]";
      SessionRun run;
      run.path_id = jp.at("path_id").get<int>();
      run.run_index = jp.value("run_index", 1);
      if (jp.contains("direction"))
        run.direction = direction_from_string(jp.at("direction").get<std::string>());
      auto key = std::make_pair(run.path_id, run.run_index);
      if (seen.count(key))
        throw ValidationError(at_path + ": duplicate path_id/run_index " +
                              std::to_string(run.path_id) + "/" + std::to_string(run.run_index));
      seen[key] = true;
      if (!jp.contains("receivers") || !jp.at("receivers").is_array())
        throw ValidationError(at_path + ": missing receivers");
      for (std::size_t r = 0; r < jp.at("receivers").size(); ++r) {
        const auto& jr = jp.at("receivers")[r];
        std::string at_recv = at_path + ".receivers[" + std::to_string(r) + "]";
        SessionReceiver recv;
        recv.distance_m = jr.at("distance_m").get<double>();
        recv.id = jr.value("id", std::string());
        if (jr.contains("speech_spl_db"))
          recv.speech_spl_db = detail::band_array(jr.at("speech_spl_db"), at_recv + ".speech_spl_db");
        if (jr.contains("noise_spl_db"))
          recv.noise_spl_db = detail::band_array(jr.at("noise_spl_db"), at_recv + ".noise_spl_db");
        if (jr.contains("t30_s"))
          recv.t30_s = detail::band_array(jr.at("t30_s"), at_recv + ".t30_s");
        if (jr.contains("recording")) {
          recv.recording = jr.at("recording").get<std::string>();
          recv.recording_channel = jr.value("recording_channel", 0);
        }
        if (jr.contains("noise_recording")) {
          recv.noise_recording = jr.at("noise_recording").get<std::string>();
          recv.noise_channel = jr.value("noise_channel", 0);
        }
        if (!recv.speech_spl_db && !recv.recording)
          throw ValidationError(at_recv + ": needs either speech_spl_db or recording");
        run.receivers.push_back(std::move(recv));
      }
      m.runs.push_back(std::move(run));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

inline SessionManifest parse_session_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ValidationError("cannot open manifest: " + path);
  json j;
  try {
    file >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return parse_session(j);
}

inline json to_json(const SessionManifest& m) {
  json j;
  j["office"] = {{"id", m.office_id},
                 {"building", m.building},
                 {"length_m", m.length_m},
                 {"width_m", m.width_m},
                 {"workstations_per_100m2", m.workstations_per_100m2}};
  j["calibration"] = {{"source_power_db", m.source_power_db},
                      {"offset_db", m.calibration_offset_db},
                      {"noise_cal_db", m.noise_cal_db}};
  if (m.sweep) {
    j["sweep"] = {{"f_start_hz", m.sweep->f_start_hz},
                  {"f_end_hz", m.sweep->f_end_hz},
                  {"duration_s", m.sweep->duration_s}};
    if (m.sample_rate_hz) j["sweep"]["sample_rate_hz"] = *m.sample_rate_hz;
  }
  j["paths"] = json::array();
  for (const auto& run : m.runs) {
    json jp;
    jp["path_id"] = run.path_id;
    jp["run_index"] = run.run_index;
    jp["direction"] = to_string(run.direction);
    jp["receivers"] = json::array();
    for (const auto& r : run.receivers) {
      json jr;
      jr["distance_m"] = r.distance_m;
      if (!r.id.empty()) jr["id"] = r.id;
      if (r.speech_spl_db) jr["speech_spl_db"] = *r.speech_spl_db;
      if (r.noise_spl_db) jr["noise_spl_db"] = *r.noise_spl_db;
      if (r.t30_s) jr["t30_s"] = *r.t30_s;
      if (r.recording) {
        jr["recording"] = *r.recording;
        jr["recording_channel"] = r.recording_channel;
      }
      if (r.noise_recording) {
        jr["noise_recording"] = *r.noise_recording;
        jr["noise_channel"] = r.noise_channel;
      }
      jp["receivers"].push_back(std::move(jr));
    }
    j["paths"].push_back(std::move(jp));
  }
  return j;
}

struct LoadedRun {
  PathMeasurement run;
  std::vector<dsp::MtfMatrix> mtfs;  // empty unless derived from recordings
};

struct LoadedSession {
  SessionManifest manifest;
  std::vector<LoadedRun> runs;
  std::vector<std::string> warnings;
};

namespace detail {

/// Band levels, per-band T30 and the modulation matrix of one recorded sweep.
struct AnalyzedRecording {
  std::array<double, kNumBands> level_db{};
  std::array<double, kNumBands> t30_s{};
  dsp::MtfMatrix mtf;
};

inline AnalyzedRecording analyze_recording(const std::vector<double>& samples, double rate,
                                           const SessionManifest& manifest) {
  if (!manifest.sweep)
    throw ValidationError("manifest: recordings present but no sweep block");
  if (manifest.sample_rate_hz && *manifest.sample_rate_hz != rate)
    throw ValidationError("recording sample rate " + std::to_string(rate) +
                          " differs from the manifest sweep rate");
  dsp::DeconvolveOptions decon;
  // The decay tail is what outlasts the sweep; keep a little slack past it.
  double tail_s = (static_cast<double>(samples.size()) -
                   manifest.sweep->duration_s * rate) / rate;
  decon.max_length_s = std::max(1.0, tail_s + 0.5);
  auto ir = dsp::deconvolve_sweep(samples, rate, *manifest.sweep, rate, decon);
  AnalyzedRecording out;
  for (std::size_t k = 0; k < kNumBands; ++k) {
    auto banded = dsp::octave_filter(ir, kBandCentersHz[k]);
    double e = banded.energy();
    out.level_db[k] = manifest.source_power_db[k] +
                      (e > 0.0 ? 10.0 * std::log10(e) : -300.0) +
                      manifest.calibration_offset_db;
    for (std::size_t f = 0; f < dsp::kNumModulationFrequencies; ++f) out.mtf.m[k][f] = 1.0;
    try {
      out.mtf.m[k] = dsp::mtf_from_ir(banded);
    } catch (const ValidationError&) {
      // keep the flat row: a silent band carries no modulation information
    }
    out.t30_s[k] = 0.0;
    try {
      auto zero_phase = dsp::octave_filter(ir, kBandCentersHz[k], /*zero_phase=*/true);
      out.t30_s[k] = dsp::t30(dsp::schroeder_decay(zero_phase)).t30_s;
    } catch (const ValidationError&) {
      // band decay not measurable; leave unknown
    }
  }
  return out;
}

inline std::array<double, kNumBands> analyze_noise(const std::vector<double>& samples,
                                                   double rate, double noise_cal_db) {
  if (samples.empty()) throw ValidationError("empty noise recording");
  std::array<double, kNumBands> out{};
  dsp::ImpulseResponse wrapped{samples, rate, ""};
  for (std::size_t k = 0; k < kNumBands; ++k) {
    auto banded = dsp::octave_filter(wrapped, kBandCentersHz[k]);
    double mean_power = banded.energy() / static_cast<double>(banded.samples.size());
    out[k] = (mean_power > 0.0 ? 10.0 * std::log10(mean_power) : -300.0) + noise_cal_db;
  }
  return out;
}

}  // namespace detail

/// Materialize a manifest into per-run measurements, reading and analyzing
/// any referenced recordings relative to `base_dir`.
inline LoadedSession load_session(const SessionManifest& manifest,
                                  const std::filesystem::path& base_dir = ".") {
  LoadedSession out;
  out.manifest = manifest;
  for (const auto& srun : manifest.runs) {
    LoadedRun loaded;
    loaded.run.office_id = manifest.office_id;
    loaded.run.path_id = srun.path_id;
    loaded.run.run_index = srun.run_index;
    loaded.run.direction = srun.direction;
    loaded.run.source_power = OctaveBandSpectrum(manifest.source_power_db);
    loaded.run.calibration_offset_db = manifest.calibration_offset_db;
    bool any_mtf = false;
    for (const auto& srecv : srun.receivers) {
      ReceiverPoint point;
      point.distance_m = srecv.distance_m;
      point.id = srecv.id;
      dsp::MtfMatrix mtf;
      for (auto& row : mtf.m) row.fill(1.0);
      if (srecv.recording) {
        auto wav = read_wav((base_dir / *srecv.recording).string());
        if (srecv.recording_channel < 0 ||
            static_cast<std::size_t>(srecv.recording_channel) >= wav.channels.size())
          throw ValidationError(*srecv.recording + ": channel " +
                                std::to_string(srecv.recording_channel) + " out of range");
        auto analyzed = detail::analyze_recording(wav.channels[srecv.recording_channel],
                                                  wav.sample_rate_hz, manifest);
        point.spectrum = OctaveBandSpectrum(analyzed.level_db);
        point.t30_s = analyzed.t30_s;
        mtf = analyzed.mtf;
        any_mtf = true;
      } else {
        point.spectrum = OctaveBandSpectrum(*srecv.speech_spl_db);
      }
      if (srecv.t30_s) point.t30_s = *srecv.t30_s;  // explicit values win
      if (srecv.noise_recording) {
        auto wav = read_wav((base_dir / *srecv.noise_recording).string());
        if (srecv.noise_channel < 0 ||
            static_cast<std::size_t>(srecv.noise_channel) >= wav.channels.size())
          throw ValidationError(*srecv.noise_recording + ": channel " +
                                std::to_string(srecv.noise_channel) + " out of range");
        if (wav.duration_s() < 60.0)
          out.warnings.push_back(*srecv.noise_recording + ": noise recording shorter than 60 s (" +
                                 std::to_string(wav.duration_s()) + " s)");
        point.noise = OctaveBandSpectrum(detail::analyze_noise(
            wav.channels[srecv.noise_channel], wav.sample_rate_hz, manifest.noise_cal_db));
      } else if (srecv.noise_spl_db) {
        point.noise = OctaveBandSpectrum(*srecv.noise_spl_db);
      }
      loaded.run.receivers.push_back(std::move(point));
      loaded.mtfs.push_back(mtf);
    }
    if (!any_mtf) loaded.mtfs.clear();  // level-based runs use the closed-form route
    loaded.run.check_distances();
    out.runs.push_back(std::move(loaded));
  }
  return out;
}

}  // namespace opra::io
