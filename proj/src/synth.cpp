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

#include "repgeo/synth.hpp"

#include <cmath>

#include "repgeo/error.hpp"
#include "repgeo/kernels.hpp"

namespace repgeo {
namespace {

std::uint64_t test_index(std::size_t prior, std::size_t test) {
  return (static_cast<std::uint64_t>(prior) << 40) | static_cast<std::uint64_t>(test);
}

}  // namespace

NormalSpec::NormalSpec(Vector mu, Vector sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (mu_.size() != sigma_.size()) fail(Errc::length_mismatch, "mu and sigma lengths differ");
  if (mu_.size() == 0) fail(Errc::invalid_argument, "normal spec needs d >= 1");
  bool any_positive = false;
  for (std::size_t j = 0; j < sigma_.size(); ++j) {
    if (sigma_[j] < 0.0) fail(Errc::invalid_argument, "sigma[" + std::to_string(j) + "] is negative");
    any_positive = any_positive || sigma_[j] > 0.0;
  }
  if (!any_positive) fail(Errc::invalid_argument, "normal spec needs at least one sigma_j > 0");
}

void validate(const HyperPrior& prior) {
  if (prior.mu.low > prior.mu.high) fail(Errc::invalid_argument, "mu range low > high");
  if (prior.sigma.low < 0.0 || prior.sigma.low > prior.sigma.high) {
    fail(Errc::invalid_argument, "sigma range must satisfy 0 <= low <= high");
  }
}

void validate(const SynthConfig& config) {
  if (config.d < 2) fail(Errc::config_invalid, "d must be >= 2");
  if (config.length.min < 2 || config.length.min > config.length.max) {
    fail(Errc::config_invalid, "length law needs 2 <= min <= max");
  }
  if (config.n_tests < 1) fail(Errc::config_invalid, "n_tests must be >= 1");
}

std::vector<HyperPrior> table4_priors() {
  return {
      {{-1.0, 1.0}, {0.0, 1.0}, "mu~U[-1,1] sigma~U[0,1]"},
      {{-1.0, 1.0}, {0.0, 10.0}, "mu~U[-1,1] sigma~U[0,10]"},
      {{3.0, 5.0}, {0.0, 1.0}, "mu~U[3,5] sigma~U[0,1]"},
      {{0.0, 0.0}, {0.0, 1.0}, "mu=0 sigma~U[0,1]"},
  };
}

NormalSpec sample_spec(const HyperPrior& prior, std::size_t d, rng::Stream& stream) {
  validate(prior);
  std::vector<double> mu(d), sigma(d);
  for (auto& m : mu) m = stream.uniform(prior.mu.low, prior.mu.high);
  for (auto& s : sigma) s = stream.uniform(prior.sigma.low, prior.sigma.high);
  return NormalSpec(Vector(std::move(mu)), Vector(std::move(sigma)));
}

NormalSpec sample_spec(const HyperPrior& prior, std::size_t d, std::uint64_t seed) {
  rng::Stream stream(seed, rng::stream_id(0, rng::Purpose::spec));
  return sample_spec(prior, d, stream);
}

NormalSpec fit_spec(std::span<const ReprMatrix> corpus) {
  if (corpus.empty()) fail(Errc::insufficient_data, "cannot fit a spec to an empty corpus");
  const std::size_t d = corpus.front().dim();
  std::size_t total = 0;
  std::vector<double> sum(d, 0.0);
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (corpus[s].dim() != d) {
      fail(Errc::dimension_mismatch, "matrix " + std::to_string(s) + " has d=" + std::to_string(corpus[s].dim()));
    }
    for (std::size_t i = 0; i < corpus[s].tokens(); ++i) kernels::axpy(1.0, corpus[s].column(i), sum);
    total += corpus[s].tokens();
  }
  if (total < 2) fail(Errc::insufficient_data, "need at least two representations");
  std::vector<double> mu(d);
  for (std::size_t j = 0; j < d; ++j) mu[j] = sum[j] / static_cast<double>(total);
  std::vector<double> ss(d, 0.0);
  for (const auto& m : corpus) {
    for (std::size_t i = 0; i < m.tokens(); ++i) {
      const auto col = m.column(i);
      for (std::size_t j = 0; j < d; ++j) {
        const double t = col[j] - mu[j];
        ss[j] += t * t;
      }
    }
  }
  std::vector<double> sigma(d);
  for (std::size_t j = 0; j < d; ++j) sigma[j] = std::sqrt(ss[j] / static_cast<double>(total));
  return NormalSpec(Vector(std::move(mu)), Vector(std::move(sigma)));
}

ReprMatrix sample_matrix(const NormalSpec& spec, std::size_t L, rng::Stream& stream, bool zero_sum) {
  const std::size_t d = spec.dim();
  std::vector<double> data(d * L);
  for (std::size_t i = 0; i < L; ++i) {
    double* col = data.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) col[j] = spec.mu()[j] + spec.sigma()[j] * stream.normal();
    if (zero_sum) {
      const double mean = kernels::sum({col, d}) / static_cast<double>(d);
      for (std::size_t j = 0; j < d; ++j) col[j] -= mean;
    }
  }
  return ReprMatrix(d, L, std::move(data));
}

std::size_t sample_length(const LengthLaw& law, rng::Stream& stream) {
  if (law.min == law.max) return law.min;
  return law.min + static_cast<std::size_t>(stream.below(law.max - law.min + 1));
}

std::vector<BatchSummary> run_table4(const SynthConfig& config, std::span<const HyperPrior> priors,
                                     PcaConvention conv, std::size_t jobs) {
  validate(config);
  std::vector<BatchSummary> rows;
  for (std::size_t p = 0; p < priors.size(); ++p) {
    validate(priors[p]);
    const HyperPrior& prior = priors[p];
    std::optional<NormalSpec> shared;
    if (!config.resample_spec_per_test) {
      rng::Stream spec_stream(config.seed, rng::stream_id(test_index(p, 0), rng::Purpose::spec));
      shared = sample_spec(prior, config.d, spec_stream);
    }
    auto make = [&](std::size_t t) {
      const std::uint64_t idx = test_index(p, t);
      rng::Stream len_stream(config.seed, rng::stream_id(idx, rng::Purpose::length));
      rng::Stream mat_stream(config.seed, rng::stream_id(idx, rng::Purpose::matrix));
      const std::size_t L = sample_length(config.length, len_stream);
      if (shared) return sample_matrix(*shared, L, mat_stream, config.zero_sum);
      rng::Stream spec_stream(config.seed, rng::stream_id(idx, rng::Purpose::spec));
      return sample_matrix(sample_spec(prior, config.d, spec_stream), L, mat_stream, config.zero_sum);
    };
    rows.push_back(batch_property_generated(config.n_tests, make, conv, true, prior.label, jobs));
  }
  return rows;
}

BatchSummary run_fixed_spec(const NormalSpec& spec, const SynthConfig& config, PcaConvention conv,
                            std::string scenario, std::size_t jobs) {
  validate(config);
  auto make = [&](std::size_t t) {
    rng::Stream len_stream(config.seed, rng::stream_id(t, rng::Purpose::length));
    rng::Stream mat_stream(config.seed, rng::stream_id(t, rng::Purpose::matrix));
    return sample_matrix(spec, sample_length(config.length, len_stream), mat_stream, config.zero_sum);
  };
  return batch_property_generated(config.n_tests, make, conv, true, std::move(scenario), jobs);
}

}  // namespace repgeo
