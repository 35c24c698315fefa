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
#include <string>
#include <vector>

#include "repgeo/linalg.hpp"
#include "repgeo/property.hpp"
#include "repgeo/rng.hpp"

namespace repgeo {

/// Independent per-dimension normal model: dimension j ~ N(mu_j, sigma_j^2).
class NormalSpec {
 public:
  NormalSpec(Vector mu, Vector sigma);

  std::size_t dim() const noexcept { return mu_.size(); }
  const Vector& mu() const noexcept { return mu_; }
  const Vector& sigma() const noexcept { return sigma_; }

 private:
  Vector mu_;
  Vector sigma_;
};

struct Range {
  double low = 0.0;
  double high = 0.0;
};

struct HyperPrior {
  Range mu;
  Range sigma;
  std::string label;
};

void validate(const HyperPrior& prior);

/// Token-count law for synthetic matrices; fixed when min == max.
struct LengthLaw {
  std::size_t min = 8;
  std::size_t max = 64;
};

struct SynthConfig {
  std::size_t d = 768;
  LengthLaw length;
  std::size_t n_tests = 4000;
  bool zero_sum = false;
  bool resample_spec_per_test = true;
  std::uint64_t seed = 0;
};

void validate(const SynthConfig& config);

/// The four uniform hyper-priors of the synthetic property table.
std::vector<HyperPrior> table4_priors();

NormalSpec sample_spec(const HyperPrior& prior, std::size_t d, rng::Stream& stream);
NormalSpec sample_spec(const HyperPrior& prior, std::size_t d, std::uint64_t seed);

/// Per-dimension population mean and standard deviation of the pooled corpus.
NormalSpec fit_spec(std::span<const ReprMatrix> corpus);

/// Column-major draws: entry (j, i) = mu_j + sigma_j z. With zero_sum, each
/// column is shifted by its own mean so its entries sum to zero.
ReprMatrix sample_matrix(const NormalSpec& spec, std::size_t L, rng::Stream& stream, bool zero_sum);

std::size_t sample_length(const LengthLaw& law, rng::Stream& stream);

/// One BatchSummary per prior. Test t of prior p draws its length, spec and
/// matrix from dedicated sub-streams, so results do not depend on `jobs`.
std::vector<BatchSummary> run_table4(const SynthConfig& config, std::span<const HyperPrior> priors,
                                     PcaConvention conv, std::size_t jobs = 1);

/// Batch of matrices drawn from one fixed spec (fitted-parameter scenario).
BatchSummary run_fixed_spec(const NormalSpec& spec, const SynthConfig& config, PcaConvention conv,
                            std::string scenario, std::size_t jobs = 1);

}  // namespace repgeo
