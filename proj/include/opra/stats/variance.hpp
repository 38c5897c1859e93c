#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opra/core/bands.hpp"
#include "opra/stats/bootstrap.hpp"
#include "opra/stats/repeat.hpp"
#include "opra/stats/rng.hpp"

namespace opra::stats {

/// Chi-square CDF for positive integer degrees of freedom, built by the
/// standard downward recursion from the 1- and 2-dof closed forms.
inline double chi_squared_cdf(double x, int dof) {
  if (x <= 0.0) return 0.0;
  double f = (dof % 2 == 1) ? std::erf(std::sqrt(0.5 * x))      // dof 1
                            : 1.0 - std::exp(-0.5 * x);          // dof 2
  for (int k = (dof % 2 == 1) ? 1 : 2; k < dof; k += 2) {
    double half_k = 0.5 * static_cast<double>(k);
    f -= std::exp(half_k * std::log(0.5 * x) - 0.5 * x - std::lgamma(half_k + 1.0));
  }
  return std::min(1.0, std::max(0.0, f));
}

enum class VarianceEstimator { anova, robust };

struct VarianceComponents {
  double sigma_b = 0.0;
  double sigma_w = 0.0;
  bool between_truncated = false;        // negative sigma_b^2 clipped to zero
  std::vector<double> group_weights;     // 1.0 everywhere for the anova estimator
};

namespace detail {

/// Normal-consistency factor for the Huber-type weight min(1, c^2 d / u^2)
/// applied to u^2 ~ chi^2_d: E[w u^2]/d.
inline double huber_chi2_consistency(double cutoff, int dof) {
  double t = cutoff * cutoff * static_cast<double>(dof);
  double d = static_cast<double>(dof);
  return (d * chi_squared_cdf(t, dof + 2) + t * (1.0 - chi_squared_cdf(t, dof))) / d;
}

}  // namespace detail

/// One-way random-effects variance components.
///
/// anova: sigma_w^2 is the pooled within-group mean square; sigma_b^2 is the
/// variance of the group means minus sigma_w^2 / k_bar, with k_bar the
/// harmonic mean group size (unbiased for unbalanced groups).
///
/// robust: groups whose studentized within-spread u_i = sqrt(SS_i / sigma_w^2)
/// exceeds the cutoff (default 1.5, in units of sqrt(dof)) are downweighted by
/// w_i = min(1, cutoff^2 dof_i / u_i^2). The pooled within sum is divided by a
/// normal-consistency factor so clean data is estimated without bias, and the
/// same weights carry into the group-mean variance (weights depend only on
/// within-group spread, which is independent of the group mean under
/// normality, so no further correction is needed there).
inline VarianceComponents variance_components(const std::vector<RepeatGroup>& groups,
                                              VarianceEstimator estimator = VarianceEstimator::anova,
                                              double robust_cutoff = 1.5) {
  if (groups.size() < 2)
    throw ValidationError("variance_components: need at least 2 groups");
  std::size_t n = groups.size();
  std::vector<double> ss(n), gmean(n);
  std::vector<int> dof(n);
  double dof_total = 0.0, inv_k_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    groups[i].validate();
    std::size_t k = groups[i].values.size();
    double sum = 0.0;
    for (double v : groups[i].values) sum += v;
    gmean[i] = sum / static_cast<double>(k);
    double acc = 0.0;
    for (double v : groups[i].values) acc += (v - gmean[i]) * (v - gmean[i]);
    ss[i] = acc;
    dof[i] = static_cast<int>(k) - 1;
    dof_total += static_cast<double>(dof[i]);
    inv_k_sum += 1.0 / static_cast<double>(k);
  }
  double k_bar = static_cast<double>(n) / inv_k_sum;

  VarianceComponents out;
  out.group_weights.assign(n, 1.0);

  double sw2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) sw2 += ss[i];
  sw2 /= dof_total;

  if (estimator == VarianceEstimator::robust && sw2 > 0.0) {
    double c2 = robust_cutoff * robust_cutoff;
    for (int iteration = 0; iteration < 200; ++iteration) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double u2 = ss[i] / sw2;
        double threshold = c2 * static_cast<double>(dof[i]);
        out.group_weights[i] = (u2 <= threshold) ? 1.0 : threshold / u2;
        num += out.group_weights[i] * ss[i];
        den += detail::huber_chi2_consistency(robust_cutoff, dof[i]) *
               static_cast<double>(dof[i]);
      }
      double next = num / den;
      bool converged = std::abs(next - sw2) < 1e-14 * std::max(sw2, 1e-30);
      sw2 = next;
      if (converged) break;
    }
  }
  out.sigma_w = std::sqrt(sw2);

  const std::vector<double>& w = out.group_weights;
  double w_sum = 0.0, w_sq = 0.0, mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w_sum += w[i];
    w_sq += w[i] * w[i];
    mu += w[i] * gmean[i];
  }
  mu /= w_sum;
  double denom = w_sum - w_sq / w_sum;
  if (denom <= 0.0) throw ValidationError("variance_components: effective group count too small");
  double s_mean2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) s_mean2 += w[i] * (gmean[i] - mu) * (gmean[i] - mu);
  s_mean2 /= denom;

  double sb2 = s_mean2 - sw2 / k_bar;
  if (sb2 < 0.0) {
    sb2 = 0.0;
    out.between_truncated = true;
  }
  out.sigma_b = std::sqrt(sb2);
  return out;
}

struct IccResult {
  std::optional<double> value;  // absent when both components are zero
  ConfidenceInterval ci95;
  std::uint64_t replicates = 0;
  std::uint64_t skipped = 0;
  std::uint64_t seed = 0;
};

inline std::optional<double> icc_point(double sigma_b, double sigma_w) {
  if (sigma_b < 0.0 || sigma_w < 0.0)
    throw ValidationError("icc: components must be non-negative");
  double b2 = sigma_b * sigma_b, w2 = sigma_w * sigma_w;
  if (b2 + w2 == 0.0) return std::nullopt;
  return b2 / (b2 + w2);
}

/// ICC with a group-level bootstrap CI: each replicate resamples whole groups
/// and reruns the variance-component pipeline.
inline IccResult icc(const std::vector<RepeatGroup>& groups,
                     VarianceEstimator estimator, std::uint64_t replicates,
                     std::uint64_t seed, unsigned workers = 1,
                     double robust_cutoff = 1.5) {
  IccResult out;
  VarianceComponents vc = variance_components(groups, estimator, robust_cutoff);
  out.value = icc_point(vc.sigma_b, vc.sigma_w);
  out.replicates = replicates;
  out.seed = seed;

  std::size_t n = groups.size();
  std::vector<double> values(replicates, 0.0);
  std::vector<char> valid(replicates, 0);
  detail::parallel_for(replicates, workers, [&](std::uint64_t i) {
    SplitMix64 rng = replicate_rng(seed, i);
    std::vector<RepeatGroup> resample(n);
    for (std::size_t j = 0; j < n; ++j) resample[j] = groups[rng.next_below(n)];
    try {
      VarianceComponents rc = variance_components(resample, estimator, robust_cutoff);
      auto v = icc_point(rc.sigma_b, rc.sigma_w);
      if (v) {
        values[i] = *v;
        valid[i] = 1;
      }
    } catch (const ValidationError&) {
      valid[i] = 0;
    }
  });
  std::vector<double> kept;
  kept.reserve(replicates);
  for (std::uint64_t i = 0; i < replicates; ++i) {
    if (valid[i]) kept.push_back(values[i]);
    else ++out.skipped;
  }
  if (!kept.empty())
    out.ci95 = {quantile(kept, 0.025), quantile(kept, 0.975)};
  return out;
}

/// Critical-range factors for the repeatability coefficient r = factor(k) * sigma_w
/// (ISO 5725-6 values for the 95% level).
inline const std::map<int, double>& default_repeatability_factors() {
  static const std::map<int, double> table = {{2, 2.8}, {3, 3.3}, {4, 3.6}};
  return table;
}

inline double repeatability_factor(int k, const std::map<int, double>& table =
                                              default_repeatability_factors()) {
  auto it = table.find(k);
  if (it == table.end())
    throw ValidationError("repeatability_factor: no factor configured for k = " +
                          std::to_string(k));
  return it->second;
}

inline double repeatability_coefficient(double sigma_w, int k,
                                        const std::map<int, double>& table =
                                            default_repeatability_factors()) {
  if (sigma_w < 0.0) throw ValidationError("repeatability_coefficient: sigma_w < 0");
  return repeatability_factor(k, table) * sigma_w;
}

enum class IccClass { excellent, fair_to_good, poor };

inline std::string to_string(IccClass c) {
  switch (c) {
    case IccClass::excellent: return "excellent";
    case IccClass::fair_to_good: return "fair_to_good";
    default: return "poor";
  }
}

/// Common interpretation bands: excellent above 0.75, fair-to-good for
/// 0.40-0.75 (both ends inclusive), poor below 0.40.
inline IccClass classify_icc(double icc_value) {
  if (icc_value < 0.0 || icc_value > 1.0)
    throw ValidationError("classify_icc: ICC outside [0, 1]");
  if (icc_value > 0.75) return IccClass::excellent;
  if (icc_value >= 0.40) return IccClass::fair_to_good;
  return IccClass::poor;
}

/// Everything the reliability table needs for one metric and repeat type.
struct ReliabilityReport {
  double sigma_w = 0.0;
  double sigma_b = 0.0;
  std::optional<double> icc;
  ConfidenceInterval icc_ci95;
  int k = 2;
  double f_factor = 2.8;
  double r_coefficient = 0.0;
  IccClass classification = IccClass::poor;

  void check_invariants() const {
    if (icc) {
      double b2 = sigma_b * sigma_b, w2 = sigma_w * sigma_w;
      if (std::abs(*icc - b2 / (b2 + w2)) > 1e-12)
        throw ValidationError("ReliabilityReport: icc does not match stored components");
    }
    if (std::abs(r_coefficient - f_factor * sigma_w) > 1e-12)
      throw ValidationError("ReliabilityReport: r does not match f * sigma_w");
  }
};

inline ReliabilityReport make_reliability_report(const std::vector<RepeatGroup>& groups, int k,
                                                 VarianceEstimator estimator,
                                                 std::uint64_t replicates, std::uint64_t seed,
                                                 unsigned workers = 1,
                                                 double robust_cutoff = 1.5) {
  ReliabilityReport report;
  VarianceComponents vc = variance_components(groups, estimator, robust_cutoff);
  report.sigma_w = vc.sigma_w;
  report.sigma_b = vc.sigma_b;
  IccResult icc_result = icc(groups, estimator, replicates, seed, workers, robust_cutoff);
  report.icc = icc_result.value;
  report.icc_ci95 = icc_result.ci95;
  report.k = k;
  report.f_factor = repeatability_factor(k);
  report.r_coefficient = report.f_factor * vc.sigma_w;
  if (report.icc) report.classification = classify_icc(*report.icc);
  return report;
}

}  // namespace opra::stats
