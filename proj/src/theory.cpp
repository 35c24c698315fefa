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

#include "repgeo/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repgeo/error.hpp"
#include "repgeo/parallel.hpp"

namespace repgeo {
namespace {

struct SpecSums {
  double s2 = 0.0;       // sum sigma^2
  double m2 = 0.0;       // sum mu^2
  double s4 = 0.0;       // sum sigma^4
  double m2s2 = 0.0;     // sum mu^2 sigma^2
};

SpecSums spec_sums(const NormalSpec& spec) {
  SpecSums s;
  for (std::size_t k = 0; k < spec.dim(); ++k) {
    const double mu2 = spec.mu()[k] * spec.mu()[k];
    const double sg2 = spec.sigma()[k] * spec.sigma()[k];
    s.s2 += sg2;
    s.m2 += mu2;
    s.s4 += sg2 * sg2;
    s.m2s2 += mu2 * sg2;
  }
  return s;
}

struct Accum {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  // sample variance around the accumulator's own mean
  double var() const {
    const double m = mean();
    return std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
  }
};

double spread(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

CovMomentReport theoretical_moments(const NormalSpec& spec) {
  const std::size_t d = spec.dim();
  if (d < 2) fail(Errc::invalid_argument, "theoretical moments need d >= 2");
  const SpecSums s = spec_sums(spec);
  const double inv = 1.0 / static_cast<double>(d - 1);
  CovMomentReport r;
  r.diag_mean = (s.s2 + s.m2) * inv;
  r.diag_std = std::sqrt(2.0 * s.s4 + 4.0 * s.m2s2) * inv;
  r.offdiag_mean = s.m2 * inv;
  r.offdiag_std = std::sqrt(s.s4 + 2.0 * s.m2s2) * inv;
  r.source = MomentSource::theoretical;
  return r;
}

std::pair<double, double> pooled_mean_standard_errors(const NormalSpec& spec, std::size_t L,
                                                      std::size_t n_matrices) {
  const CovMomentReport t = theoretical_moments(spec);
  const SpecSums s = spec_sums(spec);
  const double inv = 1.0 / static_cast<double>(spec.dim() - 1);
  const double n = static_cast<double>(n_matrices);
  const double Ld = static_cast<double>(L);
  const double diag_se = t.diag_std / std::sqrt(n * Ld);
  // Off-diagonal entries (i,j) and (i,k) share column i.
  const double pairs = Ld * (Ld - 1.0) / 2.0;
  const double cov_shared = s.m2s2 * inv * inv;
  const double var_sum = pairs * t.offdiag_std * t.offdiag_std + pairs * 2.0 * (Ld - 2.0) * cov_shared;
  const double off_se = std::sqrt(var_sum / (pairs * pairs) / n);
  return {diag_se, off_se};
}

MonteCarloMoments monte_carlo_moments(const NormalSpec& spec, std::size_t L, std::size_t n_matrices,
                                      std::uint64_t seed, bool zero_sum, std::size_t jobs) {
  if (L < 2 || n_matrices < 1) fail(Errc::invalid_argument, "need L >= 2 and n_matrices >= 1");
  if (n_matrices * L * (L - 1) / 2 < 100) {
    fail(Errc::insufficient_data, "fewer than 100 pooled off-diagonal samples");
  }
  std::vector<Accum> diag(n_matrices), off(n_matrices);
  parallel_for(n_matrices, jobs, [&](std::size_t m) {
    rng::Stream stream(seed, rng::stream_id(m, rng::Purpose::matrix));
    const SymMatrix c = token_covariance(sample_matrix(spec, L, stream, zero_sum), Centering::none);
    for (std::size_t i = 0; i < L; ++i) {
      diag[m].add(c(i, i));
      for (std::size_t j = i + 1; j < L; ++j) off[m].add(c(i, j));
    }
  });

  Accum diag_all, off_all;
  for (std::size_t m = 0; m < n_matrices; ++m) {
    diag_all.sum += diag[m].sum;
    diag_all.sum_sq += diag[m].sum_sq;
    diag_all.n += diag[m].n;
    off_all.sum += off[m].sum;
    off_all.sum_sq += off[m].sum_sq;
    off_all.n += off[m].n;
  }
  // Per-matrix mean squared deviation from the pooled mean; their average is
  // the pooled variance, their spread gives its error bar.
  auto batch_terms = [](const std::vector<Accum>& parts, double grand) {
    std::vector<double> v;
    v.reserve(parts.size());
    for (const auto& a : parts) {
      const double n = static_cast<double>(a.n);
      v.push_back(a.sum_sq / n - 2.0 * grand * a.sum / n + grand * grand);
    }
    return v;
  };
  const std::vector<double> diag_vars = batch_terms(diag, diag_all.mean());
  const std::vector<double> off_vars = batch_terms(off, off_all.mean());

  MonteCarloMoments out;
  out.estimate.diag_mean = diag_all.mean();
  out.estimate.diag_std = std::sqrt(diag_all.var());
  out.estimate.offdiag_mean = off_all.mean();
  out.estimate.offdiag_std = std::sqrt(off_all.var());
  out.estimate.source = MomentSource::estimated;

  auto& u = out.uncertainty;
  u.diag_samples = diag_all.n;
  u.offdiag_samples = off_all.n;
  std::tie(u.diag_mean_se, u.offdiag_mean_se) = pooled_mean_standard_errors(spec, L, n_matrices);
  const double nm = static_cast<double>(n_matrices);
  u.diag_var_se = n_matrices >= 2 ? spread(diag_vars) / std::sqrt(nm) : std::numeric_limits<double>::infinity();
  u.offdiag_var_se = n_matrices >= 2 ? spread(off_vars) / std::sqrt(nm) : std::numeric_limits<double>::infinity();
  return out;
}

RowSumBounds perron_bounds(const SymMatrix& c, bool nonneg_check) {
  const std::size_t n = c.size();
  if (n == 0) fail(Errc::invalid_argument, "empty matrix");
  RowSumBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = c(i, j);
      if (nonneg_check && x < 0.0) {
        fail(Errc::negative_entry, "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is negative");
      }
      row += x;
    }
    b.low = std::min(b.low, row);
    b.high = std::max(b.high, row);
  }
  return b;
}

void validate(const ConstantStructure& s) {
  if (!(s.a > 0.0) || !(s.b > 0.0) || s.L < 2) {
    fail(Errc::invalid_argument, "constant structure needs a > 0, b > 0, L >= 2");
  }
}

SymMatrix build_matrix(const ConstantStructure& s) {
  validate(s);
  SymMatrix m(s.L);
  for (std::size_t i = 0; i < s.L; ++i) {
    for (std::size_t j = i; j < s.L; ++j) m.set(i, j, i == j ? s.a : s.b);
  }
  return m;
}

ConstantSpectrum constant_structure_spectrum(const ConstantStructure& s) {
  validate(s);
  ConstantSpectrum out;
  out.lambda_max = s.a + s.b * static_cast<double>(s.L - 1);
  out.w = Vector(s.L, 1.0 / std::sqrt(static_cast<double>(s.L)));
  out.lambda_rest = s.a - s.b;
  return out;
}

}  // namespace repgeo
