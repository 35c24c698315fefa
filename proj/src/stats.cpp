// Copyright 2026 The repgeo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repgeo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "repgeo/error.hpp"
#include "repgeo/kernels.hpp"
#include "repgeo/parallel.hpp"
#include "repgeo/rng.hpp"

namespace repgeo {
namespace {

std::pair<double, double> mean_and_population_std(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = kernels::sum(x) / n;
  return {mean, std::sqrt(kernels::sum_sq_dev(x, mean) / n)};
}

double empirical_quantile(std::span<const double> sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  const double h = std::clamp(p * n - 0.5, 0.0, n - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Standardized standardize(std::span<const double> sample) {
  if (sample.size() < 2) fail(Errc::insufficient_data, "standardize needs at least two values");
  const auto [mean, sd] = mean_and_population_std(sample);
  if (!(sd > 0.0)) fail(Errc::constant_dimension, "sample has zero standard deviation");
  Standardized out;
  out.mean = mean;
  out.sd = sd;
  out.values.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) out.values[i] = (sample[i] - mean) / sd;
  return out;
}

MomentReport moments(std::span<const double> z) {
  if (z.size() < 2) fail(Errc::insufficient_data, "moments need at least two values");
  const double n = static_cast<double>(z.size());
  const double mean = kernels::sum(z) / n;
  const kernels::MomentSums m = kernels::moment_sums(z, 0.0);
  const double sd = std::sqrt(m.s2 / n - mean * mean);
  if (std::abs(mean) > 1e-6 || std::abs(sd - 1.0) > 1e-6) {
    fail(Errc::not_standardized, "input mean " + std::to_string(mean) + ", sd " + std::to_string(sd));
  }
  return {m.s3 / n, m.s4 / n};
}

std::vector<std::vector<double>> dimension_samples(std::span<const ReprMatrix> corpus) {
  if (corpus.empty()) return {};
  const std::size_t d = corpus.front().dim();
  std::size_t total = 0;
  for (const auto& m : corpus) {
    if (m.dim() != d) fail(Errc::dimension_mismatch, "corpus matrices disagree on d");
    total += m.tokens();
  }
  std::vector<std::vector<double>> rows(d, std::vector<double>(total));
  std::size_t offset = 0;
  for (const auto& m : corpus) {
    for (std::size_t i = 0; i < m.tokens(); ++i) {
      for (std::size_t j = 0; j < d; ++j) rows[j][offset + i] = m(j, i);
    }
    offset += m.tokens();
  }
  return rows;
}

MomentSweep per_dimension_moment_sweep(std::span<const std::vector<double>> dims, std::size_t jobs) {
  if (dims.empty()) fail(Errc::insufficient_data, "moment sweep over zero dimensions");
  MomentSweep sweep;
  sweep.per_dim.resize(dims.size());
  parallel_for(dims.size(), jobs, [&](std::size_t j) {
    Standardized s;
    try {
      s = standardize(dims[j]);
    } catch (const Error& e) {
      if (e.code() == Errc::constant_dimension) {
        fail(Errc::constant_dimension, "dimension " + std::to_string(j) + " is constant");
      }
      throw;
    }
    sweep.per_dim[j] = {j, s.mean, s.sd, moments(s.values)};
  });
  std::vector<double> skew, kurt;
  for (const auto& p : sweep.per_dim) {
    skew.push_back(p.moments.skewness);
    kurt.push_back(p.moments.kurtosis);
  }
  std::tie(sweep.skew_mean, sweep.skew_std) = mean_and_population_std(skew);
  std::tie(sweep.kurt_mean, sweep.kurt_std) = mean_and_population_std(kurt);
  return sweep;
}

MomentSweep per_dimension_moment_sweep(std::span<const ReprMatrix> corpus, std::size_t jobs) {
  const auto dims = dimension_samples(corpus);
  return per_dimension_moment_sweep(dims, jobs);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(Errc::invalid_argument, "normal_quantile needs 0 < p < 1");
  // Acklam's rational approximation (relative error ~1.15e-9).
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement; the upper tail is polished through the complement to
  // avoid cancellation in 1 - p.
  const double e = p > 0.5 ? (0.5 * std::erfc(x / std::numbers::sqrt2) - (1.0 - p)) * -1.0
                           : normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(Errc::insufficient_data, "pearson needs two equal-length samples");
  const double n = static_cast<double>(x.size());
  const double mx = kernels::sum(x) / n, my = kernels::sum(y) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

QQData qq_points(std::span<const double> sample, std::size_t k, double subsample_fraction, std::uint64_t seed) {
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
    fail(Errc::invalid_argument, "subsample fraction must be in (0, 1]");
  }
  std::vector<double> values(sample.begin(), sample.end());
  if (subsample_fraction < 1.0) {
    const auto keep = static_cast<std::size_t>(std::llround(subsample_fraction * static_cast<double>(values.size())));
    rng::Stream stream(seed, rng::stream_id(0, rng::Purpose::subsample));
    for (std::size_t i = 0; i < keep && i + 1 < values.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(stream.below(values.size() - i));
      std::swap(values[i], values[j]);
    }
    values.resize(keep);
  }
  if (k < 2 || k > values.size()) {
    fail(Errc::insufficient_data, "need 2 <= k <= sample size (k=" + std::to_string(k) +
                                      ", n=" + std::to_string(values.size()) + ")");
  }
  std::sort(values.begin(), values.end());
  QQData out;
  out.points.reserve(k);
  std::vector<double> xs(k), ys(k);
  for (std::size_t m = 0; m < k; ++m) {
    const double p = (static_cast<double>(m) + 0.5) / static_cast<double>(k);
    xs[m] = normal_quantile(p);
    ys[m] = empirical_quantile(values, p);
    out.points.emplace_back(xs[m], ys[m]);
  }
  out.correlation = pearson(xs, ys);
  return out;
}

Spread offdiag_spread(const SymMatrix& sigma) {
  const std::size_t n = sigma.size();
  if (n < 2) fail(Errc::insufficient_data, "off-diagonal spread needs n >= 2");
  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(sigma(i, j));
  }
  const auto [mean, sd] = mean_and_population_std(upper);
  return {mean, sd};
}

}  // namespace repgeo
