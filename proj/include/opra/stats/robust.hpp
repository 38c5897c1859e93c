#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "opra/core/bands.hpp"
#include "opra/stats/bootstrap.hpp"
#include "opra/stats/rng.hpp"

namespace opra::stats {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of y on x.
inline LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("ols_fit: need >= 2 paired points");
  double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ValidationError("ols_fit: zero spread in x");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

/// High-breakdown starting line: for each point take the median slope to all
/// other points, then the median of those medians (Siegel's repeated median).
inline LineFit repeated_median_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  std::vector<double> med_slopes;
  med_slopes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> slopes;
    slopes.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || x[j] == x[i]) continue;
      slopes.push_back((y[j] - y[i]) / (x[j] - x[i]));
    }
    if (!slopes.empty()) med_slopes.push_back(median(std::move(slopes)));
  }
  if (med_slopes.empty()) throw ValidationError("repeated_median_line: zero spread in x");
  LineFit fit;
  fit.slope = median(std::move(med_slopes));
  std::vector<double> intercepts(n);
  for (std::size_t i = 0; i < n; ++i) intercepts[i] = y[i] - fit.slope * x[i];
  fit.intercept = median(std::move(intercepts));
  return fit;
}

/// Bounded-influence M-estimation line: bisquare IRLS, tuned for 95% normal
/// efficiency (c = 4.685), rescaled-MAD scale, initialized from the repeated
/// median line. On residual-free data the start is already exact and the
/// first pass returns it unchanged, so the fit coincides with OLS there.
///
/// R^2 is computed from the final weights:
///   1 - sum(w e^2) / sum(w (y - weighted_mean(y))^2).
inline LineFit robust_linreg_fit(const std::vector<double>& x, const std::vector<double>& y,
                                 double tuning = 4.685, int max_iterations = 50) {
  if (x.size() != y.size() || x.size() < 3)
    throw ValidationError("robust_linreg: need >= 3 paired points");
  LineFit fit = repeated_median_line(x, y);

  std::size_t n = x.size();
  std::vector<double> residuals(n), weights(n, 1.0);
  auto compute_residuals = [&] {
    for (std::size_t i = 0; i < n; ++i)
      residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
  };
  auto residual_scale = [&]() -> double {
    std::vector<double> centered(n);
    double med = median(residuals);
    for (std::size_t i = 0; i < n; ++i) centered[i] = std::abs(residuals[i] - med);
    double mad = 1.4826 * median(std::move(centered));
    if (mad > 0.0) return mad;
    // Residuals are mostly exact zeros (e.g. a constructed line plus a gross
    // outlier); fall back to the mean absolute residual so the outlier still
    // gets a finite, tiny weight.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(residuals[i]);
    return acc / static_cast<double>(n);
  };

  for (int it = 0; it < max_iterations; ++it) {
    compute_residuals();
    double s = residual_scale();
    if (s <= 0.0) break;  // perfect fit
    for (std::size_t i = 0; i < n; ++i) {
      double u = residuals[i] / (tuning * s);
      weights[i] = (std::abs(u) < 1.0) ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
    }
    // weighted least squares step
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sw += weights[i];
      swx += weights[i] * x[i];
      swy += weights[i] * y[i];
      swxx += weights[i] * x[i] * x[i];
      swxy += weights[i] * x[i] * y[i];
    }
    double det = sw * swxx - swx * swx;
    if (sw <= 0.0 || std::abs(det) < 1e-300)
      throw ValidationError("robust_linreg: all weights vanished or zero spread in x");
    double slope = (sw * swxy - swx * swy) / det;
    double intercept = (swy - slope * swx) / sw;
    bool converged = std::abs(slope - fit.slope) + std::abs(intercept - fit.intercept) < 1e-12;
    fit.slope = slope;
    fit.intercept = intercept;
    if (converged) break;
  }

  compute_residuals();
  double s = residual_scale();
  double sw = 0.0, swy = 0.0;
  if (s > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      double u = residuals[i] / (tuning * s);
      weights[i] = (std::abs(u) < 1.0) ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
    }
  } else {
    for (auto& w : weights) w = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    sw += weights[i];
    swy += weights[i] * y[i];
  }
  double ybar = swy / sw;
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sse += weights[i] * residuals[i] * residuals[i];
    sst += weights[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = (sst <= 0.0) ? 1.0 : std::max(0.0, std::min(1.0, 1.0 - sse / sst));
  return fit;
}

struct RobustRegression {
  LineFit fit;
  ConfidenceInterval intercept_ci95;
  ConfidenceInterval slope_ci95;
  ConfidenceInterval r_squared_ci95;
  std::uint64_t replicates = 0;
  std::uint64_t skipped = 0;  // degenerate resamples (zero x spread)
  std::uint64_t seed = 0;
};

/// Robust line fit plus pair-resampling bootstrap CIs for the coefficients.
/// Degenerate resamples (all pairs drawn from one x value) are excluded from
/// the percentile computation and counted.
inline RobustRegression robust_linreg(const std::vector<double>& x, const std::vector<double>& y,
                                      std::uint64_t replicates, std::uint64_t seed,
                                      unsigned workers = 1) {
  RobustRegression out;
  out.fit = robust_linreg_fit(x, y);
  out.replicates = replicates;
  out.seed = seed;
  std::size_t n = x.size();

  std::vector<double> intercepts(replicates), slopes(replicates), r2s(replicates);
  std::vector<char> valid(replicates, 0);
  detail::parallel_for(replicates, workers, [&](std::uint64_t i) {
    SplitMix64 rng = replicate_rng(seed, i);
    std::vector<double> rx(n), ry(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t idx = rng.next_below(n);
      rx[j] = x[idx];
      ry[j] = y[idx];
    }
    try {
      LineFit f = robust_linreg_fit(rx, ry);
      intercepts[i] = f.intercept;
      slopes[i] = f.slope;
      r2s[i] = f.r_squared;
      valid[i] = 1;
    } catch (const ValidationError&) {
      valid[i] = 0;
    }
  });

  std::vector<double> ki, ks, kr;
  ki.reserve(replicates);
  ks.reserve(replicates);
  kr.reserve(replicates);
  for (std::uint64_t i = 0; i < replicates; ++i) {
    if (valid[i]) {
      ki.push_back(intercepts[i]);
      ks.push_back(slopes[i]);
      kr.push_back(r2s[i]);
    } else {
      ++out.skipped;
    }
  }
  if (ki.empty()) throw ValidationError("robust_linreg: every resample degenerate");
  out.intercept_ci95 = {quantile(ki, 0.025), quantile(ki, 0.975)};
  out.slope_ci95 = {quantile(ks, 0.025), quantile(ks, 0.975)};
  out.r_squared_ci95 = {quantile(kr, 0.025), quantile(kr, 0.975)};
  return out;
}

}  // namespace opra::stats
