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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "repgeo/linalg.hpp"

namespace repgeo {

struct Standardized {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;  // population (divisor D)
};

/// (s - mean) / sd with population statistics. Throws ConstantDimension when
/// the sample has zero spread.
Standardized standardize(std::span<const double> sample);

/// Non-excess moments of a standardized sample: E[z^3] and E[z^4].
struct MomentReport {
  double skewness = 0.0;
  double kurtosis = 0.0;
};

MomentReport moments(std::span<const double> standardized);

struct DimensionMoments {
  std::size_t dim = 0;
  double mean = 0.0;
  double sd = 0.0;
  MomentReport moments;
};

struct MomentSweep {
  std::vector<DimensionMoments> per_dim;
  double skew_mean = 0.0, skew_std = 0.0;
  double kurt_mean = 0.0, kurt_std = 0.0;
};

/// Rows of the pooled corpus: result[j] holds dimension j of every
/// representation, in corpus order.
std::vector<std::vector<double>> dimension_samples(std::span<const ReprMatrix> corpus);

/// Standardize + moments for every dimension, aggregated as mean and
/// population standard deviation across dimensions.
MomentSweep per_dimension_moment_sweep(std::span<const std::vector<double>> dims, std::size_t jobs = 1);
MomentSweep per_dimension_moment_sweep(std::span<const ReprMatrix> corpus, std::size_t jobs = 1);

struct QQData {
  std::vector<std::pair<double, double>> points;  // (theoretical, empirical)
  double correlation = 0.0;
};

/// Normal Q-Q data at levels (m - 0.5)/k. A fraction < 1 draws that share of
/// the sample without replacement first (deterministic in `seed`). Empirical
/// quantiles interpolate linearly between order statistics at position
/// p*n - 0.5.
QQData qq_points(std::span<const double> sample, std::size_t k, double subsample_fraction = 1.0,
                 std::uint64_t seed = 0);

double normal_cdf(double x) noexcept;
/// Inverse standard-normal CDF: rational approximation polished with one
/// Halley step against normal_cdf.
double normal_quantile(double p);

double pearson(std::span<const double> x, std::span<const double> y);

struct Spread {
  double mean = 0.0;
  double std = 0.0;  // population
};

/// Mean and spread of the strict upper triangle.
Spread offdiag_spread(const SymMatrix& sigma);

}  // namespace repgeo
