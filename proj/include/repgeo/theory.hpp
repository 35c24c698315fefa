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

#include "repgeo/linalg.hpp"
#include "repgeo/synth.hpp"

namespace repgeo {

enum class MomentSource { theoretical, estimated };

/// Mean and standard deviation of the diagonal and off-diagonal entries of
/// the token covariance C = R^T R / (d - 1).
struct CovMomentReport {
  double diag_mean = 0.0;
  double diag_std = 0.0;
  double offdiag_mean = 0.0;
  double offdiag_std = 0.0;
  MomentSource source = MomentSource::theoretical;
};

/// Closed-form moments for raw entries r_kj = mu_k + sigma_k z:
///   E[C_ii]   = sum(sigma^2 + mu^2) / (d-1)
///   Var[C_ii] = sum(2 sigma^4 + 4 mu^2 sigma^2) / (d-1)^2
///   E[C_ij]   = sum(mu^2) / (d-1)
///   Var[C_ij] = sum(sigma^4 + 2 mu^2 sigma^2) / (d-1)^2
CovMomentReport theoretical_moments(const NormalSpec& spec);

/// Standard errors attached to a Monte-Carlo estimate.
struct MomentUncertainty {
  std::size_t diag_samples = 0;
  std::size_t offdiag_samples = 0;
  // Theoretical standard error of each pooled mean. Off-diagonal entries that
  // share a column are correlated (Cov = sum mu^2 sigma^2 / (d-1)^2), which is
  // included.
  double diag_mean_se = 0.0;
  double offdiag_mean_se = 0.0;
  // Batch-means error bars for the pooled variances: per-matrix variance
  // estimates, spread across matrices.
  double diag_var_se = 0.0;
  double offdiag_var_se = 0.0;
};

struct MonteCarloMoments {
  CovMomentReport estimate;
  MomentUncertainty uncertainty;
};

/// Pools diagonal and strict-upper entries of token_covariance(center=none)
/// over n_matrices sampled d x L matrices.
MonteCarloMoments monte_carlo_moments(const NormalSpec& spec, std::size_t L, std::size_t n_matrices,
                                      std::uint64_t seed, bool zero_sum, std::size_t jobs = 1);

/// Theoretical standard errors of the pooled diagonal / off-diagonal means for
/// n_matrices independent L x L covariance matrices.
std::pair<double, double> pooled_mean_standard_errors(const NormalSpec& spec, std::size_t L, std::size_t n_matrices);

struct RowSumBounds {
  double low = 0.0;
  double high = 0.0;
};

/// Minimum and maximum row sums. With nonneg_check, a negative entry raises
/// NegativeEntry (the bound needs an entrywise nonnegative matrix).
RowSumBounds perron_bounds(const SymMatrix& c, bool nonneg_check = true);

/// Symmetric L x L matrix with diagonal a and off-diagonal b.
struct ConstantStructure {
  double a = 1.0;
  double b = 0.0;
  std::size_t L = 2;
};

void validate(const ConstantStructure& s);
SymMatrix build_matrix(const ConstantStructure& s);

struct ConstantSpectrum {
  double lambda_max = 0.0;  // a + b (L - 1), eigenvector 1/sqrt(L)
  Vector w;
  double lambda_rest = 0.0;  // a - b, multiplicity L - 1
};

ConstantSpectrum constant_structure_spectrum(const ConstantStructure& s);

}  // namespace repgeo
