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

namespace repgeo {

enum class InitKind { gaussian, uniform };
enum class Positional { none, learned_random };
enum class Activation { relu, gelu };

struct InitScheme {
  InitKind kind = InitKind::gaussian;
  double scale = 0.05;  // std for gaussian, half-width for uniform
};

/// Randomly initialized post-norm transformer encoder. Defaults are sized for
/// seconds-scale layer sweeps.
struct ToyModelConfig {
  std::size_t d_model = 128;
  std::size_t n_layers = 8;
  std::size_t n_heads = 4;
  std::size_t d_ff = 512;
  std::size_t vocab_size = 1000;
  std::size_t max_len = 512;
  InitScheme init;
  bool layer_norm = true;
  Positional positional = Positional::learned_random;
  Activation activation = Activation::relu;
  std::uint64_t seed = 0;
};

void validate(const ToyModelConfig& config);

/// Row-major dense block used for parameters and activations.
struct Dense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Dense() = default;
  Dense(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) noexcept { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) noexcept { return {data.data() + i * cols, cols}; }

  friend bool operator==(const Dense&, const Dense&) = default;
};

struct LayerNormParams {
  std::vector<double> gain;
  std::vector<double> bias;
  friend bool operator==(const LayerNormParams&, const LayerNormParams&) = default;
};

// Projection weights are stored transposed (out x in) so every output
// coordinate is one contiguous dot product.
struct EncoderLayer {
  Dense wq, wk, wv, wo;  // d_model x d_model
  Dense w1;              // d_ff x d_model
  Dense w2;              // d_model x d_ff
  LayerNormParams norm_attn, norm_ffn;
  friend bool operator==(const EncoderLayer&, const EncoderLayer&) = default;
};

struct ToyModel {
  ToyModelConfig config;
  Dense token_embedding;       // vocab x d_model
  Dense position_embedding;    // max_len x d_model (empty when positional = none)
  LayerNormParams norm_embed;  // applied to the lookup output when layer_norm is on
  std::vector<EncoderLayer> layers;
};

bool same_parameters(const ToyModel& a, const ToyModel& b);

ToyModel init_model(const ToyModelConfig& config);

/// Optional capture of attention probabilities: attention[layer][head] is an
/// L x L row-stochastic matrix.
struct ForwardTrace {
  std::vector<std::vector<Dense>> attention;
};

/// Representation matrices after the lookup (index 0) and after each encoder
/// layer (index k).
std::vector<ReprMatrix> forward_all_layers(const ToyModel& model, std::span<const std::size_t> token_ids,
                                           ForwardTrace* trace = nullptr);

using TokenSequence = std::vector<std::size_t>;

/// Random id sequences with lengths uniform on [len_min, len_max]. With
/// `distinct`, ids within a sequence are drawn without replacement.
std::vector<TokenSequence> random_sequences(std::size_t n, std::size_t vocab, std::size_t len_min,
                                            std::size_t len_max, bool distinct, std::uint64_t seed);

/// corpus[k][s] = layer-k representation of sequence s.
std::vector<std::vector<ReprMatrix>> encode_corpus(const ToyModel& model, std::span<const TokenSequence> corpus,
                                                   std::size_t jobs = 1);

struct LayerSweep {
  std::vector<BatchSummary> per_layer;  // index 0 = lookup
  PcaConvention convention = kDefaultConvention;
};

LayerSweep layer_sweep(std::span<const std::vector<ReprMatrix>> per_layer, PcaConvention conv, std::size_t jobs = 1);
LayerSweep layer_sweep(const ToyModel& model, std::span<const TokenSequence> corpus, PcaConvention conv,
                       std::size_t jobs = 1);

/// Column i of output sequence s is column i of layer u, with u drawn
/// uniformly from [layer_lo, layer_hi] independently per token.
std::vector<ReprMatrix> mix_random_layers(std::span<const std::vector<ReprMatrix>> per_layer, std::size_t layer_lo,
                                          std::size_t layer_hi, std::uint64_t seed);

/// Pools every column of the corpus, shuffles, and regroups into matrices
/// with the original lengths in the original order.
std::vector<ReprMatrix> shuffle_cross_sequence(std::span<const ReprMatrix> corpus, std::uint64_t seed);

}  // namespace repgeo
