#pragma once

#include <json.hpp>

#include "opra/io/session.hpp"
#include "opra/synth/synth.hpp"

namespace opra::io {

/// A synthetic repeated-pair session in the manifest format, with the ground
/// truth of each run alongside. The manifest uses inline band levels, so the
/// whole statistics path runs without audio files.
struct SimulatedSession {
  SessionManifest manifest;
  json ground_truth;
};

inline SimulatedSession simulate_session(const synth::SyntheticOfficeSpec& spec,
                                         int office_id = 1, int path_id = 1) {
  auto [first, second] = synth::generate_repeat_pair(spec, office_id, path_id);

  SimulatedSession out;
  out.manifest.office_id = office_id;
  out.manifest.building = "S";
  for (std::size_t k = 0; k < kNumBands; ++k)
    out.manifest.source_power_db[k] = first.run.source_power.at(k);

  auto to_session_run = [](const PathMeasurement& run) {
    SessionRun srun;
    srun.path_id = run.path_id;
    srun.run_index = run.run_index;
    srun.direction = run.direction;
    for (const auto& r : run.receivers) {
      SessionReceiver recv;
      recv.distance_m = r.distance_m;
      std::array<double, kNumBands> levels{};
      for (std::size_t k = 0; k < kNumBands; ++k) levels[k] = r.spectrum.at(k);
      recv.speech_spl_db = levels;
      if (r.noise) {
        std::array<double, kNumBands> noise{};
        for (std::size_t k = 0; k < kNumBands; ++k) noise[k] = r.noise->at(k);
        recv.noise_spl_db = noise;
      }
      if (r.t30_s) recv.t30_s = *r.t30_s;
      srun.receivers.push_back(std::move(recv));
    }
    return srun;
  };
  out.manifest.runs.push_back(to_session_run(first.run));
  out.manifest.runs.push_back(to_session_run(second.run));

  auto truth_json = [](const synth::GroundTruth& t) {
    json j;
    j["d2s_db"] = t.d2s_db;
    j["lpas4m_db"] = t.lpas4m_db;
    if (t.rd_m) j["rd_m"] = *t.rd_m;
    else j["rd_m"] = nullptr;
    if (t.lpab_dba) j["lpab_dba"] = *t.lpab_dba;
    if (t.t30_mid_s) j["t30_mid_s"] = *t.t30_mid_s;
    return j;
  };
  out.ground_truth["seed"] = spec.seed;
  out.ground_truth["runs"] = json::array();
  out.ground_truth["runs"].push_back(truth_json(first.truth));
  out.ground_truth["runs"].push_back(truth_json(second.truth));
  return out;
}

}  // namespace opra::io
