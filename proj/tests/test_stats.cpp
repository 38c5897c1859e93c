#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "opra/io/dataset.hpp"
#include "opra/io/repeat_tables.hpp"
#include "opra/stats/bootstrap.hpp"
#include "opra/stats/kendall.hpp"
#include "opra/stats/repeat.hpp"
#include "opra/stats/robust.hpp"
#include "opra/stats/rng.hpp"
#include "opra/stats/variance.hpp"

using namespace opra;
using namespace opra::stats;

namespace {

std::vector<double> table_deltas(const std::string& metric) {
  auto ds = data::bundled_dataset();
  return delta_values(data::deltas_of(data::type1_groups(ds, metric)));
}

double stat_mean(const std::vector<double>& v) { return mean(v); }

}  // namespace

TEST_CASE("delta_range: first-path pair, equal values, permutation") {
  RepeatGroup g{"path 1", "rd", {12.9, 13.9}};
  auto d = delta_range(g);
  CHECK(d.delta == Catch::Approx(1.0).margin(1e-12));
  CHECK(d.group_mean == Catch::Approx(13.4).margin(1e-12));

  RepeatGroup equal{"g", "m", {4.2, 4.2, 4.2}};
  CHECK(delta_range(equal).delta == 0.0);

  RepeatGroup perm{"g", "m", {13.9, 12.9}};
  CHECK(delta_range(perm).delta == Catch::Approx(d.delta));
  CHECK(delta_range(perm).group_mean == Catch::Approx(d.group_mean));

  RepeatGroup single{"g", "m", {1.0}};
  CHECK_THROWS_AS(delta_range(single), ValidationError);
}

TEST_CASE("mean_delta over the bundled dataset ranges") {
  auto ds = data::bundled_dataset();
  auto rd = data::deltas_of(data::type1_groups(ds, "rd"));
  REQUIRE(rd.size() == 36);
  // Recomputed from the rounded published table; the publication reports
  // 1.17 from unrounded data.
  CHECK(mean_delta(rd) == Catch::Approx(1.047222).margin(1e-5));

  auto d2s = data::deltas_of(data::type1_groups(ds, "d2s"));
  CHECK(mean_delta(d2s) == Catch::Approx(0.733333).margin(1e-5));
  auto lp = data::deltas_of(data::type1_groups(ds, "lpas4m"));
  CHECK(mean_delta(lp) == Catch::Approx(1.161111).margin(1e-5));

  std::vector<DeltaRecord> single{{"g", "m", 0.7, 5.0}};
  CHECK(mean_delta(single) == Catch::Approx(0.7));
  CHECK_THROWS_AS(mean_delta({}), ValidationError);
}

TEST_CASE("type2 groups: retained pairs and published-range agreement") {
  auto ds = data::bundled_dataset();
  auto groups = data::type2_groups(ds, "rd");
  REQUIRE(groups.size() == 7);
  for (const auto& g : groups) CHECK(g.values.size() == 4);
  // Means of the Type2 ranges recomputed from the rounded table match the
  // published values exactly at two decimals.
  CHECK(mean_delta(data::deltas_of(groups)) == Catch::Approx(2.571429).margin(1e-5));
  CHECK(mean_delta(data::deltas_of(data::type2_groups(ds, "d2s"))) ==
        Catch::Approx(1.357143).margin(1e-5));
  CHECK(mean_delta(data::deltas_of(data::type2_groups(ds, "lpas4m"))) ==
        Catch::Approx(2.742857).margin(1e-5));
}

TEST_CASE("type2 retention override changes the office-21 pair") {
  auto ds = data::bundled_dataset({{21, {23, 25}}});
  auto groups = data::type2_groups(ds, "rd");
  const auto* office21 = &groups[1];
  REQUIRE(office21->group_id == "office 21");
  // paths 23 and 25: rD {7.1, 6.9, 7.6, 8.2}
  CHECK(delta_range(*office21).delta == Catch::Approx(1.3).margin(1e-12));
  CHECK_THROWS_AS(data::bundled_dataset({{22, {26, 99}}}), ValidationError);
}

TEST_CASE("quantile: interpolation of order statistics") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == Catch::Approx(2.5));
  CHECK(quantile(v, 1.0 / 3.0) == Catch::Approx(2.0));
}

TEST_CASE("bootstrap_ci: constant data gives a degenerate interval") {
  std::vector<double> c(10, 3.25);
  auto res = bootstrap_ci(c, stat_mean, 2000, 11);
  CHECK(res.point == Catch::Approx(3.25));
  CHECK(res.ci95.lower == Catch::Approx(3.25));
  CHECK(res.ci95.upper == Catch::Approx(3.25));
}

TEST_CASE("bootstrap_ci: exhaustive enumeration oracle on {1,2,3}") {
  // All 3^3 = 27 equally likely resamples, enumerated independently. The
  // bootstrap distribution of the mean is discrete, so the reference is the
  // distribution quantile inf{x : F(x) >= p} over the 27 atoms.
  std::vector<double> data{1.0, 2.0, 3.0};
  std::vector<double> exhaustive;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        exhaustive.push_back((data[a] + data[b] + data[c]) / 3.0);
  REQUIRE(exhaustive.size() == 27);
  std::sort(exhaustive.begin(), exhaustive.end());
  auto exact_quantile = [&](double p) {
    std::size_t idx = 0;
    while (idx < exhaustive.size() &&
           static_cast<double>(idx + 1) / 27.0 < p)
      ++idx;
    return exhaustive[idx];
  };

  auto res = bootstrap_ci(data, stat_mean, 100000, 20260301);
  for (double p : {0.025, 0.16, 0.84, 0.975}) {
    double exact = exact_quantile(p);
    double boot = quantile(res.replicate_values, p);
    INFO("p = " << p);
    CHECK(std::abs(boot - exact) <= 0.02);
  }
}

TEST_CASE("bootstrap_ci: deterministic for a fixed seed and any worker count") {
  auto deltas = table_deltas("rd");
  auto one = bootstrap_ci(deltas, stat_mean, 20000, 99, 1);
  auto two = bootstrap_ci(deltas, stat_mean, 20000, 99, 2);
  auto four = bootstrap_ci(deltas, stat_mean, 20000, 99, 4);
  CHECK(one.ci95.lower == two.ci95.lower);
  CHECK(one.ci95.upper == two.ci95.upper);
  CHECK(one.ci95.lower == four.ci95.lower);
  CHECK(one.replicate_values == two.replicate_values);
}

TEST_CASE("bootstrap_ci: two seeds agree closely at B = 1e5") {
  auto deltas = table_deltas("rd");
  auto a = bootstrap_ci(deltas, stat_mean, 100000, 1, 2);
  auto b = bootstrap_ci(deltas, stat_mean, 100000, 2, 2);
  CHECK(std::abs(a.ci95.lower - b.ci95.lower) < 0.03);
  CHECK(std::abs(a.ci95.upper - b.ci95.upper) < 0.03);
}

TEST_CASE("bootstrap_ci: failing statistic names the replicate") {
  // The statistic accepts the original sample {1, 2} but rejects resamples
  // with a repeated element, which some replicate will certainly contain.
  std::vector<double> data{1.0, 2.0};
  auto picky = [](const std::vector<double>& v) -> double {
    if (v[0] == v[1]) throw ValidationError("tied resample");
    return v[0] + v[1];
  };
  CHECK_THROWS_WITH(bootstrap_ci(data, picky, 64, 5),
                    Catch::Matchers::ContainsSubstring("replicate"));
}

TEST_CASE("kendall tau-b: monotone sequences and hand-checked ties") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> up{2, 4, 5, 7, 11};
  std::vector<double> down{9, 7, 5, 3, 1};
  CHECK(kendall_tau_b(x, up) == Catch::Approx(1.0));
  CHECK(kendall_tau_b(x, down) == Catch::Approx(-1.0));

  // Hand computation: pairs of ({1,2,2,3}, {1,2,3,3}):
  // concordant 4, discordant 0, one tie in x only, one tie in y only,
  // no joint ties; n0 = 6. tau_b = 4 / sqrt(5 * 5) = 0.8.
  std::vector<double> tx{1, 2, 2, 3};
  std::vector<double> ty{1, 2, 3, 3};
  CHECK(kendall_tau_b(tx, ty) == Catch::Approx(0.8).margin(1e-12));

  std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(kendall_tau_b(flat, flat), ValidationError);
}

TEST_CASE("kendall tau-b over the bundled Type1 ranges") {
  auto rd = table_deltas("rd");
  auto d2s = table_deltas("d2s");
  auto lp = table_deltas("lpas4m");
  CHECK(kendall_tau_b(rd, d2s) == Catch::Approx(0.0844).margin(2e-4));
  CHECK(kendall_tau_b(rd, lp) == Catch::Approx(0.2707).margin(2e-4));
  CHECK(kendall_tau_b(d2s, lp) == Catch::Approx(0.3573).margin(2e-4));

  auto res = kendall_tau(d2s, lp, 20000, 7, 2);
  CHECK(res.ci95.lower > 0.0);  // the significant pairing excludes zero
  CHECK(res.ci95.upper < 0.7);
}

TEST_CASE("repeated median line resists outliers") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i + 1.0);
  }
  y[7] = 500.0;
  auto fit = repeated_median_line(x, y);
  CHECK(fit.slope == Catch::Approx(2.0).margin(1e-9));
  CHECK(fit.intercept == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("robust_linreg: exact line matches OLS exactly") {
  std::vector<double> x{0, 1, 2, 3, 4, 5, 6};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  auto fit = robust_linreg_fit(x, y);
  auto ols = ols_fit(x, y);
  CHECK(std::abs(fit.slope - ols.slope) < 1e-6);
  CHECK(std::abs(fit.intercept - ols.intercept) < 1e-6);
  CHECK(fit.slope == Catch::Approx(2.0).margin(1e-9));
  CHECK(fit.intercept == Catch::Approx(1.0).margin(1e-9));
  CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("robust_linreg: one gross outlier against the clean-subset OLS oracle") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(0.5 * i);
    y.push_back(1.5 + 0.8 * (0.5 * i));
  }
  y[13] *= 10.0;  // gross outlier
  std::vector<double> cx = x, cy = y;
  cx.erase(cx.begin() + 13);
  cy.erase(cy.begin() + 13);
  auto oracle = ols_fit(cx, cy);
  auto fit = robust_linreg_fit(x, y);
  CHECK(std::abs(fit.slope - oracle.slope) < 0.02);
  CHECK(std::abs(fit.intercept - oracle.intercept) < 0.05);
}

TEST_CASE("robust_linreg over the bundled D2S-vs-Lp ranges") {
  auto d2s = table_deltas("d2s");
  auto lp = table_deltas("lpas4m");
  auto fit = robust_linreg_fit(lp, d2s);
  CHECK(fit.intercept == Catch::Approx(0.3069).margin(2e-3));
  CHECK(fit.slope == Catch::Approx(0.3232).margin(2e-3));
  CHECK(fit.r_squared == Catch::Approx(0.5005).margin(5e-3));

  auto boot = robust_linreg(lp, d2s, 5000, 17, 2);
  CHECK(boot.slope_ci95.lower > 0.05);
  CHECK(boot.slope_ci95.upper < 0.6);
  CHECK(boot.skipped == 0);
}

TEST_CASE("robust_linreg rejects degenerate abscissa") {
  std::vector<double> x(5, 2.0);
  std::vector<double> y{1, 2, 3, 4, 5};
  CHECK_THROWS_AS(robust_linreg_fit(x, y), ValidationError);
}

TEST_CASE("chi-squared CDF checkpoints") {
  CHECK(chi_squared_cdf(3.841, 1) == Catch::Approx(0.95).margin(2e-3));
  CHECK(chi_squared_cdf(5.991, 2) == Catch::Approx(0.95).margin(2e-3));
  CHECK(chi_squared_cdf(9.488, 4) == Catch::Approx(0.95).margin(2e-3));
  CHECK(chi_squared_cdf(0.0, 3) == 0.0);
}

TEST_CASE("variance_components: zero within-spread and the k=2 identity") {
  std::vector<RepeatGroup> same = {{"a", "m", {5.0, 5.0}}, {"b", "m", {9.0, 9.0}}};
  auto vc = variance_components(same);
  CHECK(vc.sigma_w == 0.0);
  CHECK(vc.sigma_b > 0.0);

  // For k = 2 the pooled within mean square equals mean(delta^2) / 2 exactly.
  auto ds = data::bundled_dataset();
  auto groups = data::type1_groups(ds, "rd");
  auto deltas = data::deltas_of(groups);
  double msq = 0.0;
  for (const auto& d : deltas) msq += d.delta * d.delta;
  msq /= static_cast<double>(deltas.size());
  auto anova = variance_components(groups, VarianceEstimator::anova);
  CHECK(anova.sigma_w * anova.sigma_w == Catch::Approx(msq / 2.0).margin(1e-12));
}

TEST_CASE("variance_components on the bundled Type1 groups") {
  auto ds = data::bundled_dataset();
  struct Row {
    const char* metric;
    double anova_sw, robust_sw, robust_icc;
  };
  // Frozen from an independent run of the same estimators.
  for (const Row& row : {Row{"rd", 0.925188, 0.885391, 0.857135},
                         Row{"d2s", 0.649359, 0.629753, 0.768174},
                         Row{"lpas4m", 1.121878, 0.985095, 0.840159}}) {
    auto groups = data::type1_groups(ds, row.metric);
    auto anova = variance_components(groups, VarianceEstimator::anova);
    CHECK(anova.sigma_w == Catch::Approx(row.anova_sw).margin(1e-4));
    auto robust = variance_components(groups, VarianceEstimator::robust);
    CHECK(robust.sigma_w == Catch::Approx(row.robust_sw).margin(1e-4));
    auto icc_value = icc_point(robust.sigma_b, robust.sigma_w);
    REQUIRE(icc_value);
    CHECK(*icc_value == Catch::Approx(row.robust_icc).margin(1e-3));
  }
  // The anova within-spread for rD is the documented 0.93 checkpoint.
  auto rd_anova = variance_components(data::type1_groups(ds, "rd"));
  CHECK(rd_anova.sigma_w == Catch::Approx(0.93).margin(0.01));
}

TEST_CASE("variance_components on the bundled Type2 groups") {
  auto ds = data::bundled_dataset();
  auto lp = data::type2_groups(ds, "lpas4m");
  auto anova = variance_components(lp, VarianceEstimator::anova);
  auto icc_anova = icc_point(anova.sigma_b, anova.sigma_w);
  REQUIRE(icc_anova);
  CHECK(*icc_anova == Catch::Approx(0.206542).margin(1e-4));
  auto robust = variance_components(lp, VarianceEstimator::robust);
  auto icc_rob = icc_point(robust.sigma_b, robust.sigma_w);
  REQUIRE(icc_rob);
  CHECK(*icc_rob == Catch::Approx(0.226459).margin(1e-3));
  CHECK(classify_icc(*icc_rob) == IccClass::poor);
}

TEST_CASE("variance_components: generative recovery at 500 groups") {
  SplitMix64 rng(424242);
  std::vector<RepeatGroup> groups;
  for (int i = 0; i < 500; ++i) {
    double mu = 3.0 * rng.next_normal();
    RepeatGroup g{"g" + std::to_string(i), "m", {mu + rng.next_normal(), mu + rng.next_normal()}};
    groups.push_back(std::move(g));
  }
  auto vc = variance_components(groups, VarianceEstimator::anova);
  CHECK(std::abs(vc.sigma_b - 3.0) < 0.3);
  CHECK(std::abs(vc.sigma_w - 1.0) < 0.1);
  auto icc_value = icc_point(vc.sigma_b, vc.sigma_w);
  REQUIRE(icc_value);
  CHECK(std::abs(*icc_value - 0.9) < 0.03);

  // The robust estimator stays close to truth on clean data.
  auto robust = variance_components(groups, VarianceEstimator::robust);
  CHECK(std::abs(robust.sigma_w - 1.0) < 0.1);
  CHECK(std::abs(robust.sigma_b - 3.0) < 0.3);
}

TEST_CASE("variance_components: negative between estimate is truncated") {
  // Group means nearly identical but large within-noise.
  std::vector<RepeatGroup> groups = {
      {"a", "m", {0.0, 10.0}}, {"b", "m", {5.1, 4.9}}, {"c", "m", {1.0, 9.0}}};
  auto vc = variance_components(groups);
  CHECK(vc.sigma_b == 0.0);
  CHECK(vc.between_truncated);
}

TEST_CASE("icc endpoints and the undefined flag") {
  CHECK(*icc_point(2.0, 0.0) == Catch::Approx(1.0));
  CHECK(*icc_point(0.0, 2.0) == Catch::Approx(0.0));
  CHECK_FALSE(icc_point(0.0, 0.0).has_value());
}

TEST_CASE("icc bootstrap over groups is deterministic and sane") {
  auto ds = data::bundled_dataset();
  auto groups = data::type1_groups(ds, "rd");
  auto a = icc(groups, VarianceEstimator::robust, 2000, 31, 1);
  auto b = icc(groups, VarianceEstimator::robust, 2000, 31, 2);
  REQUIRE(a.value);
  CHECK(a.ci95.lower == b.ci95.lower);
  CHECK(a.ci95.upper == b.ci95.upper);
  CHECK(a.ci95.lower < *a.value);
  CHECK(*a.value < a.ci95.upper);
  CHECK(a.ci95.upper <= 1.0);
}

TEST_CASE("repeatability coefficient: factor table") {
  CHECK(repeatability_factor(2) == 2.8);
  CHECK(repeatability_factor(3) == 3.3);
  CHECK(repeatability_factor(4) == 3.6);
  CHECK(repeatability_coefficient(1.0, 2) == Catch::Approx(2.8));
  CHECK(repeatability_coefficient(1.0, 4) == Catch::Approx(3.6));
  // sigma_w 0.90 at k = 2 rounds to 2.5 at one decimal
  CHECK(std::round(repeatability_coefficient(0.90, 2) * 10.0) / 10.0 == Catch::Approx(2.5));
  CHECK_THROWS_AS(repeatability_coefficient(1.0, 5), ValidationError);
  std::map<int, double> extended = {{5, 3.9}};
  CHECK(repeatability_coefficient(1.0, 5, extended) == Catch::Approx(3.9));
}

TEST_CASE("classify_icc thresholds") {
  CHECK(classify_icc(0.87) == IccClass::excellent);
  CHECK(classify_icc(0.76) == IccClass::excellent);
  CHECK(classify_icc(0.75) == IccClass::fair_to_good);
  CHECK(classify_icc(0.40) == IccClass::fair_to_good);  // boundary inclusive
  CHECK(classify_icc(0.39) == IccClass::poor);
  CHECK(classify_icc(0.21) == IccClass::poor);
  CHECK_THROWS_AS(classify_icc(1.2), ValidationError);
}

TEST_CASE("reliability report invariants hold on the bundled data") {
  auto ds = data::bundled_dataset();
  auto report = make_reliability_report(data::type1_groups(ds, "rd"), 2,
                                        VarianceEstimator::robust, 1000, 3, 2);
  CHECK_NOTHROW(report.check_invariants());
  REQUIRE(report.icc);
  CHECK(report.classification == IccClass::excellent);
  CHECK(report.r_coefficient == Catch::Approx(2.8 * report.sigma_w));
}

TEST_CASE("shift and scale behaviour of the repeat statistics") {
  auto ds = data::bundled_dataset();
  auto groups = data::type1_groups(ds, "rd");

  auto shifted = groups;
  for (auto& g : shifted)
    for (auto& v : g.values) v += 3.7;
  auto scaled = groups;
  for (auto& g : scaled)
    for (auto& v : g.values) v *= 2.5;

  auto d0 = data::deltas_of(groups);
  auto d1 = data::deltas_of(shifted);
  auto d2 = data::deltas_of(scaled);
  CHECK(mean_delta(d1) == Catch::Approx(mean_delta(d0)).margin(1e-9));
  CHECK(mean_delta(d2) == Catch::Approx(2.5 * mean_delta(d0)).margin(1e-9));

  for (auto est : {VarianceEstimator::anova, VarianceEstimator::robust}) {
    auto v0 = variance_components(groups, est);
    auto v1 = variance_components(shifted, est);
    auto v2 = variance_components(scaled, est);
    CHECK(v1.sigma_w == Catch::Approx(v0.sigma_w).margin(1e-9));
    CHECK(v2.sigma_w == Catch::Approx(2.5 * v0.sigma_w).margin(1e-9));
    CHECK(*icc_point(v1.sigma_b, v1.sigma_w) ==
          Catch::Approx(*icc_point(v0.sigma_b, v0.sigma_w)).margin(1e-9));
    CHECK(*icc_point(v2.sigma_b, v2.sigma_w) ==
          Catch::Approx(*icc_point(v0.sigma_b, v0.sigma_w)).margin(1e-9));
  }

  auto x = delta_values(d0);
  auto y = table_deltas("d2s");
  double tau0 = kendall_tau_b(x, y);
  std::vector<double> xs = x;
  for (auto& v : xs) v = v * 2.5;
  CHECK(kendall_tau_b(xs, y) == Catch::Approx(tau0).margin(1e-12));

  auto fit0 = robust_linreg_fit(x, y);
  std::vector<double> y_shift = y;
  for (auto& v : y_shift) v += 3.7;
  auto fit1 = robust_linreg_fit(x, y_shift);
  CHECK(fit1.slope == Catch::Approx(fit0.slope).margin(1e-9));
  CHECK(fit1.intercept == Catch::Approx(fit0.intercept + 3.7).margin(1e-9));
}

TEST_CASE("groups_from_tidy assembles both repeat types") {
  auto ds = data::bundled_dataset();
  auto tidy = data::tidy_from_dataset(ds);
  auto groups = data::groups_from_tidy(tidy);
  REQUIRE(groups.type1.at("rd").size() == 36);
  // Tidy assembly has no per-office path discard configured by default, so
  // the three-path offices keep their first two paths, matching the bundle.
  REQUIRE(groups.type2.at("rd").size() == 7);
  auto bundled = data::type2_groups(ds, "rd");
  for (std::size_t i = 0; i < bundled.size(); ++i)
    CHECK(groups.type2.at("rd")[i].values == bundled[i].values);
}
