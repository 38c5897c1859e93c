// Command-line front end: analysis of measurement sessions, repeatability
// statistics over tidy metric tables, synthetic fixture generation, the
// bundled-dataset reproduction report, threshold classification, and
// plot-ready data export.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "opra/io/analyze.hpp"
#include "opra/io/dataset_json.hpp"
#include "opra/io/report.hpp"
#include "opra/io/session.hpp"
#include "opra/io/simulate.hpp"
#include "opra/iso3382/classify.hpp"

namespace {

using opra::ValidationError;
using json = nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

std::map<int, std::array<int, 2>> parse_retention(const std::vector<std::string>& specs) {
  std::map<int, std::array<int, 2>> out;
  for (const auto& spec : specs) {
    int office = 0, a = 0, b = 0;
    char colon = 0, comma = 0;
    std::istringstream in(spec);
    if (!(in >> office >> colon >> a >> comma >> b) || colon != ':' || comma != ',')
      throw ValidationError("bad --type2-retention '" + spec + "' (expected office:pathA,pathB)");
    out[office] = {a, b};
  }
  return out;
}

double tolerance_scale(const std::string& profile) {
  if (profile == "paper") return 1.0;
  if (profile == "strict") return 0.5;
  if (profile == "lenient") return 2.0;
  throw ValidationError("unknown --tolerance-profile '" + profile +
                        "' (expected paper|strict|lenient)");
}

opra::iso3382::AnnexATable load_annex_table(const std::string& path) {
  opra::iso3382::AnnexATable table;
  if (path.empty()) return table;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open annex table: " + path);
  json j;
  in >> j;
  table.rd_good_max_m = j.value("rd_good_max_m", table.rd_good_max_m);
  table.rd_poor_min_m = j.value("rd_poor_min_m", table.rd_poor_min_m);
  table.d2s_good_min_db = j.value("d2s_good_min_db", table.d2s_good_min_db);
  table.d2s_poor_below_db = j.value("d2s_poor_below_db", table.d2s_poor_below_db);
  table.lpas4m_good_max_db = j.value("lpas4m_good_max_db", table.lpas4m_good_max_db);
  table.lpas4m_poor_min_db = j.value("lpas4m_poor_min_db", table.lpas4m_poor_min_db);
  return table;
}

std::vector<opra::data::TidyRow> read_tidy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open tidy table: " + path);
  std::vector<opra::data::TidyRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    opra::data::TidyRow row;
    if (!(fields >> row.office >> row.path >> row.run >> row.metric >> row.value)) {
      if (line_no == 1) continue;  // header
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected 'office path run metric value'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(path + ": no data rows");
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open-plan office acoustic metrics and repeatability statistics"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::uint64_t seed = 1;
  std::uint64_t resamples = 100000;
  unsigned workers = 0;
  std::string tolerance_profile = "paper";
  std::string annex_table_path;
  std::vector<std::string> retention_spec;
  app.add_option("--seed", seed, "random seed for all bootstrap draws");
  app.add_option("--resamples", resamples, "bootstrap replicates (default 100000)");
  app.add_option("--workers", workers, "worker threads (0 = hardware)");
  app.add_option("--tolerance-profile", tolerance_profile,
                 "pass/fail tolerance profile: paper|strict|lenient");
  app.add_option("--annex-a-table", annex_table_path, "JSON overriding the quality thresholds");
  app.add_option("--type2-retention", retention_spec,
                 "office:pathA,pathB retained in a three-path office (repeatable)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "compute the metric set of a session");
  std::string manifest_path, analyze_out, analyze_json_path, abscissa = "log2";
  bool no_noise_adjust = false;
  std::size_t min_receivers = 5, max_receivers = 8;
  analyze->add_option("manifest", manifest_path, "session manifest (JSON)")->required();
  analyze->add_option("--out", analyze_out, "write the table here instead of stdout");
  analyze->add_option("--json", analyze_json_path, "also write structured records");
  analyze->add_option("--abscissa", abscissa, "distance axis for the STI fit: log2|linear");
  analyze->add_flag("--no-noise-adjust", no_noise_adjust,
                    "skip the office-level uniform noise gain search");
  analyze->add_option("--min-receivers", min_receivers, "receiver count lower bound");
  analyze->add_option("--max-receivers", max_receivers, "receiver count upper bound");

  // repeatability
  auto* repeat = app.add_subcommand("repeatability",
                                    "range and reliability statistics over a tidy table");
  std::string tidy_path, repeat_out, estimator_name = "robust";
  repeat->add_option("table", tidy_path, "tidy TSV: office path run metric value")->required();
  repeat->add_option("--out", repeat_out, "write the tables here instead of stdout");
  repeat->add_option("--estimator", estimator_name, "variance components: robust|anova");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "emit a synthetic session with ground truth");
  std::string sim_out = "session.json", sim_truth = "truth.json", distances_csv = "2,3,4.5,6.5,9";
  double sim_d2s = 6.0, sim_noise = std::numeric_limits<double>::quiet_NaN();
  double sim_level_sd = 0.0, sim_decay_sd = 0.0, sim_t30 = 0.0;
  simulate->add_option("--out", sim_out, "manifest output path");
  simulate->add_option("--truth", sim_truth, "ground-truth output path");
  simulate->add_option("--d2s", sim_d2s, "decay rate per distance doubling, dB");
  simulate->add_option("--noise-db", sim_noise, "flat noise band level, dB");
  simulate->add_option("--t30", sim_t30, "uniform reverberation time, s (0 = none)");
  simulate->add_option("--distances", distances_csv, "receiver distances, comma-separated metres");
  simulate->add_option("--level-sd", sim_level_sd, "repeat perturbation of band levels, dB");
  simulate->add_option("--decay-sd", sim_decay_sd, "repeat perturbation of decay rates, dB");

  // reproduce-paper
  auto* reproduce = app.add_subcommand(
      "reproduce-paper", "recompute the published summaries from the bundled dataset");
  std::string reproduce_out, reproduce_json_path, reproduce_estimator = "robust";
  reproduce->add_option("--out", reproduce_out, "write the report here instead of stdout");
  reproduce->add_option("--json", reproduce_json_path, "also write structured records");
  reproduce->add_option("--estimator", reproduce_estimator, "variance components: robust|anova");

  // classify
  auto* classify = app.add_subcommand("classify", "quality class of one metric value");
  std::string classify_metric;
  double classify_value = 0.0;
  classify->add_option("--metric", classify_metric, "rd|d2s|lpas4m")->required();
  classify->add_option("--value", classify_value, "metric value")->required();

  // emit-plot-data
  auto* plot = app.add_subcommand("emit-plot-data", "tabular data behind the summary figures");
  std::string plot_kind, plot_out;
  plot->add_option("--kind", plot_kind, "fig2|fig3|fig4")->required();
  plot->add_option("--out", plot_out, "write the table here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    auto retention = parse_retention(retention_spec);

    if (*analyze) {
      auto manifest = opra::io::parse_session_file(manifest_path);
      auto base_dir = std::filesystem::path(manifest_path).parent_path();
      auto loaded = opra::io::load_session(manifest, base_dir.empty() ? "." : base_dir);
      opra::io::AnalyzeOptions options;
      options.adjust_noise = !no_noise_adjust;
      options.metrics.annex_a = load_annex_table(annex_table_path);
      options.metrics.receiver_bounds = {min_receivers, max_receivers};
      if (abscissa == "linear")
        options.metrics.abscissa = opra::iso3382::Abscissa::linear_distance;
      else if (abscissa != "log2")
        throw ValidationError("unknown --abscissa '" + abscissa + "' (expected log2|linear)");
      for (const auto& loaded_run : loaded.runs)
        loaded_run.run.validate(options.metrics.receiver_bounds);
      auto result = opra::io::analyze_session(loaded, options);
      auto text = opra::io::analysis_tsv(result);
      if (analyze_out.empty()) std::cout << text;
      else write_text(analyze_out, text);
      if (!analyze_json_path.empty())
        write_text(analyze_json_path, opra::io::analysis_json(result).dump(2) + "\n");
      return 0;
    }

    if (*repeat) {
      auto rows = read_tidy(tidy_path);
      auto groups = opra::data::groups_from_tidy(rows, retention);
      opra::report::ReportOptions options;
      options.seed = seed;
      options.replicates = resamples;
      options.workers = workers;
      options.estimator = (estimator_name == "anova") ? opra::stats::VarianceEstimator::anova
                                                      : opra::stats::VarianceEstimator::robust;
      auto text = opra::report::repeatability_tables(groups, options);
      if (repeat_out.empty()) std::cout << text;
      else write_text(repeat_out, text);
      return 0;
    }

    if (*simulate) {
      opra::synth::SyntheticOfficeSpec spec;
      spec.ref_level_db.fill(60.0);
      spec.decay_db_per_doubling.fill(sim_d2s);
      spec.distances_m.clear();
      std::istringstream in(distances_csv);
      std::string token;
      while (std::getline(in, token, ',')) spec.distances_m.push_back(std::stod(token));
      if (std::isnan(sim_noise))
        sim_noise = 60.0 - sim_d2s * std::log2(8.0);  // crossing near 8 m
      spec.noise = opra::OctaveBandSpectrum::flat(sim_noise);
      if (sim_t30 > 0.0) {
        std::array<double, opra::kNumBands> t{};
        t.fill(sim_t30);
        spec.t30_s = t;
      }
      spec.repeat_level_sd_db = sim_level_sd;
      spec.repeat_decay_sd_db = sim_decay_sd;
      spec.seed = seed;
      auto sim = opra::io::simulate_session(spec);
      write_text(sim_out, opra::io::to_json(sim.manifest).dump(2) + "\n");
      write_text(sim_truth, sim.ground_truth.dump(2) + "\n");
      std::cout << "wrote " << sim_out << " and " << sim_truth << "\n";
      return 0;
    }

    if (*reproduce) {
      auto ds = opra::data::bundled_dataset(retention);
      opra::report::ReportOptions options;
      options.seed = seed;
      options.replicates = resamples;
      options.workers = workers;
      options.tolerance_scale = tolerance_scale(tolerance_profile);
      options.retention = retention;
      options.estimator = (reproduce_estimator == "anova")
                              ? opra::stats::VarianceEstimator::anova
                              : opra::stats::VarianceEstimator::robust;
      auto report = opra::report::reproduce_paper(ds, options);
      auto text = report.text();
      if (reproduce_out.empty()) std::cout << text;
      else write_text(reproduce_out, text);
      if (!reproduce_json_path.empty())
        write_text(reproduce_json_path, report.records().dump(2) + "\n");
      return 0;
    }

    if (*classify) {
      auto table = load_annex_table(annex_table_path);
      std::cout << opra::iso3382::to_string(
                       opra::iso3382::classify_annex_a(classify_metric, classify_value, table))
                << "\n";
      return 0;
    }

    if (*plot) {
      auto ds = opra::data::bundled_dataset(retention);
      opra::report::ReportOptions options;
      options.seed = seed;
      options.replicates = resamples;
      options.workers = workers;
      auto text = opra::report::emit_plot_data(plot_kind, ds, options);
      if (plot_out.empty()) std::cout << text;
      else write_text(plot_out, text);
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
