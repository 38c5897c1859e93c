#include <catch_amalgamated.hpp>

#include <cmath>

#include "opra/dsp/mtf.hpp"
#include "opra/dsp/schroeder.hpp"
#include "opra/iso3382/metrics.hpp"
#include "opra/stats/variance.hpp"
#include "opra/synth/synth.hpp"

using namespace opra;
using namespace opra::synth;

TEST_CASE("generate_path: uniform decay gives exact analytic ground truth") {
  auto spec = SyntheticOfficeSpec::flat_example();
  auto generated = generate_path(spec);
  CHECK(generated.truth.d2s_db == Catch::Approx(6.0).margin(1e-12));
  REQUIRE(generated.truth.rd_m);
  CHECK(*generated.truth.rd_m == Catch::Approx(8.0).margin(1e-6));
}

TEST_CASE("generate_path: pipeline recovers the constructed metrics") {
  auto spec = SyntheticOfficeSpec::flat_example();
  auto generated = generate_path(spec);
  auto metrics = iso3382::compute_metric_set(generated.run);
  CHECK(metrics.d2s_db == Catch::Approx(generated.truth.d2s_db).margin(1e-6));
  CHECK(metrics.lpas4m_db == Catch::Approx(generated.truth.lpas4m_db).margin(1e-6));
  REQUIRE(metrics.rd_m);
  REQUIRE(generated.truth.rd_m);
  CHECK(*metrics.rd_m == Catch::Approx(*generated.truth.rd_m).margin(1e-4));
  REQUIRE(metrics.lpab_dba);
  CHECK(*metrics.lpab_dba == Catch::Approx(*generated.truth.lpab_dba).margin(1e-9));
}

TEST_CASE("generate_path: per-band decay rates and reverberation still round-trip") {
  SyntheticOfficeSpec spec;
  spec.ref_level_db = {58, 60, 62, 61, 59, 56, 52};
  spec.decay_db_per_doubling = {5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0};
  spec.noise = OctaveBandSpectrum({38, 39, 40, 40, 39, 38, 37});
  spec.t30_s = std::array<double, kNumBands>{0.6, 0.55, 0.5, 0.45, 0.4, 0.4, 0.35};
  spec.distances_m = {2.0, 3.0, 4.5, 6.5, 9.0, 12.0};
  auto generated = generate_path(spec);
  auto metrics = iso3382::compute_metric_set(generated.run);
  CHECK(metrics.d2s_db == Catch::Approx(generated.truth.d2s_db).margin(1e-6));
  CHECK(metrics.lpas4m_db == Catch::Approx(generated.truth.lpas4m_db).margin(1e-6));
  REQUIRE(metrics.rd_m);
  REQUIRE(generated.truth.rd_m);
  CHECK(*metrics.rd_m == Catch::Approx(*generated.truth.rd_m).margin(1e-4));
  REQUIRE(metrics.t30_mid_s);
  CHECK(*metrics.t30_mid_s == Catch::Approx(*generated.truth.t30_mid_s).margin(1e-12));
}

TEST_CASE("generate_path: STI floor never crossing 0.5 leaves rd undefined") {
  auto spec = SyntheticOfficeSpec::flat_example();
  spec.noise.reset();  // no noise, no reverberation: STI = 1 everywhere
  auto generated = generate_path(spec);
  CHECK_FALSE(generated.truth.rd_m);
  auto metrics = iso3382::compute_metric_set(generated.run);
  CHECK_FALSE(metrics.rd_m);
}

TEST_CASE("generate_repeat_pair: zero perturbation repeats exactly") {
  auto spec = SyntheticOfficeSpec::flat_example();
  auto [first, second] = generate_repeat_pair(spec);
  auto m1 = iso3382::compute_metric_set(first.run);
  auto m2 = iso3382::compute_metric_set(second.run);
  CHECK(m1.d2s_db == m2.d2s_db);
  CHECK(m1.lpas4m_db == m2.lpas4m_db);
  CHECK(*m1.rd_m == *m2.rd_m);

  SECTION("with perturbation the runs differ but stay deterministic") {
    spec.repeat_level_sd_db = 0.5;
    spec.repeat_decay_sd_db = 0.3;
    auto [a1, a2] = generate_repeat_pair(spec);
    auto [b1, b2] = generate_repeat_pair(spec);
    CHECK(iso3382::compute_metric_set(a2.run).d2s_db !=
          iso3382::compute_metric_set(a1.run).d2s_db);
    CHECK(iso3382::compute_metric_set(a2.run).d2s_db ==
          iso3382::compute_metric_set(b2.run).d2s_db);
  }
}

TEST_CASE("generate_ir: T30 recovery within 1%") {
  for (double t_true : {0.3, 0.5, 0.7, 1.2}) {
    auto generated = generate_ir(t_true, 24000.0, 2.5 * t_true, 71);
    CHECK_FALSE(generated.short_warning);
    auto fit = dsp::t30(dsp::schroeder_decay(generated.ir));
    INFO("T = " << t_true);
    CHECK(fit.t30_s == Catch::Approx(t_true).epsilon(0.01));
  }
}

TEST_CASE("generate_ir: modulation transfer matches the exponential closed form") {
  auto generated = generate_ir(1.0, 16000.0, 5.0, 2020);
  auto m = dsp::mtf_from_ir(generated.ir);
  CHECK(m[2] == Catch::Approx(0.910).margin(0.005));  // F = 1 Hz
}

TEST_CASE("generate_ir: determinism and the short-length warning") {
  auto a = generate_ir(0.5, 16000.0, 1.0, 9);
  auto b = generate_ir(0.5, 16000.0, 1.0, 9);
  CHECK(a.ir.samples == b.ir.samples);
  auto c = generate_ir(0.5, 16000.0, 1.0, 10);
  CHECK(a.ir.samples != c.ir.samples);

  CHECK(generate_ir(1.0, 16000.0, 1.2, 9).short_warning);
  CHECK_THROWS_AS(generate_ir(0.0, 16000.0, 1.0, 9), ValidationError);
}

TEST_CASE("generate_repeat_study: endpoints and generative recovery") {
  auto zero_noise = generate_repeat_study(3.0, 0.0, 50, 2, 5);
  auto vc = stats::variance_components(zero_noise.groups);
  auto icc_value = stats::icc_point(vc.sigma_b, vc.sigma_w);
  REQUIRE(icc_value);
  CHECK(*icc_value == Catch::Approx(1.0));

  auto study = generate_repeat_study(3.0, 1.0, 500, 2, 12345);
  auto vc2 = stats::variance_components(study.groups);
  auto icc2 = stats::icc_point(vc2.sigma_b, vc2.sigma_w);
  REQUIRE(icc2);
  CHECK(std::abs(*icc2 - 0.9) < 0.03);

  // Mean range of two normal draws tends to 2 sigma / sqrt(pi).
  auto big = generate_repeat_study(0.0, 1.0, 20000, 2, 777);
  double mean_delta = 0.0;
  for (const auto& g : big.groups) mean_delta += std::abs(g.values[0] - g.values[1]);
  mean_delta /= static_cast<double>(big.groups.size());
  double expected = 2.0 / std::sqrt(3.14159265358979323846);
  CHECK(std::abs(mean_delta - expected) / expected < 0.02);
}
