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

#include "repgeo/toymodel.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>

#include "repgeo/error.hpp"
#include "repgeo/kernels.hpp"
#include "repgeo/parallel.hpp"
#include "repgeo/rng.hpp"

namespace repgeo {
namespace {

constexpr double kNormEps = 1e-12;

// Parameter tensors draw from their own streams, indexed in creation order.
class ParamInit {
 public:
  explicit ParamInit(const ToyModelConfig& c) : config_(c) {}

  Dense next(std::size_t rows, std::size_t cols) {
    rng::Stream stream(config_.seed, rng::stream_id(index_++, rng::Purpose::init));
    Dense m(rows, cols);
    for (double& x : m.data) {
      x = config_.init.kind == InitKind::gaussian ? config_.init.scale * stream.normal()
                                                  : stream.uniform(-config_.init.scale, config_.init.scale);
    }
    return m;
  }

 private:
  const ToyModelConfig& config_;
  std::uint64_t index_ = 0;
};

LayerNormParams unit_norm(std::size_t d) { return {std::vector<double>(d, 1.0), std::vector<double>(d, 0.0)}; }

// y (L x out) = x (L x in) * w^T where w is out x in.
Dense project(const Dense& x, const Dense& w) {
  Dense y(x.rows, w.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t o = 0; o < w.rows; ++o) y(i, o) = kernels::dot(x.row(i), w.row(o));
  }
  return y;
}

void layer_norm_rows(Dense& x, const LayerNormParams& p) {
  const double n = static_cast<double>(x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    const double mean = kernels::sum(row) / n;
    const double inv = 1.0 / std::sqrt(kernels::sum_sq_dev(row, mean) / n + kNormEps);
    for (std::size_t j = 0; j < x.cols; ++j) row[j] = (row[j] - mean) * inv * p.gain[j] + p.bias[j];
  }
}

double activate(double x, Activation a) {
  if (a == Activation::relu) return x > 0.0 ? x : 0.0;
  return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
}

Dense self_attention(const Dense& x, const EncoderLayer& layer, std::size_t heads, std::vector<Dense>* probs) {
  const Dense q = project(x, layer.wq);
  const Dense k = project(x, layer.wk);
  const Dense v = project(x, layer.wv);
  const std::size_t L = x.rows, d = x.cols, dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Dense context(L, d);
  std::vector<double> scores(L);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dk;
    Dense p(L, L);
    for (std::size_t i = 0; i < L; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < L; ++j) {
        scores[j] = kernels::dot(q.row(i).subspan(off, dk), k.row(j).subspan(off, dk)) * scale;
        top = std::max(top, scores[j]);
      }
      double z = 0.0;
      for (std::size_t j = 0; j < L; ++j) {
        scores[j] = std::exp(scores[j] - top);
        z += scores[j];
      }
      auto out = context.row(i).subspan(off, dk);
      for (std::size_t j = 0; j < L; ++j) {
        p(i, j) = scores[j] / z;
        kernels::axpy(p(i, j), v.row(j).subspan(off, dk), out);
      }
    }
    if (probs) probs->push_back(std::move(p));
  }
  return project(context, layer.wo);
}

ReprMatrix to_repr(const Dense& x) {
  // rows are tokens; ReprMatrix columns are tokens, so the layout is shared
  return ReprMatrix(x.cols, x.rows, x.data);
}

}  // namespace

void validate(const ToyModelConfig& c) {
  if (c.d_model < 2 || c.n_heads < 1 || c.d_ff < 1 || c.vocab_size < 1 || c.max_len < 2) {
    fail(Errc::config_invalid, "model sizes must be >= 1 (d_model, max_len >= 2)");
  }
  if (c.d_model % c.n_heads != 0) fail(Errc::config_invalid, "d_model must be divisible by n_heads");
  if (!(c.init.scale > 0.0) || !std::isfinite(c.init.scale)) fail(Errc::config_invalid, "init scale must be > 0");
}

bool same_parameters(const ToyModel& a, const ToyModel& b) {
  return a.token_embedding == b.token_embedding && a.position_embedding == b.position_embedding &&
         a.norm_embed == b.norm_embed && a.layers == b.layers;
}

ToyModel init_model(const ToyModelConfig& config) {
  validate(config);
  ToyModel m;
  m.config = config;
  ParamInit init(config);
  const std::size_t d = config.d_model;
  m.token_embedding = init.next(config.vocab_size, d);
  if (config.positional == Positional::learned_random) m.position_embedding = init.next(config.max_len, d);
  m.norm_embed = unit_norm(d);
  m.layers.reserve(config.n_layers);
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    EncoderLayer layer;
    layer.wq = init.next(d, d);
    layer.wk = init.next(d, d);
    layer.wv = init.next(d, d);
    layer.wo = init.next(d, d);
    layer.w1 = init.next(config.d_ff, d);
    layer.w2 = init.next(d, config.d_ff);
    layer.norm_attn = unit_norm(d);
    layer.norm_ffn = unit_norm(d);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

std::vector<ReprMatrix> forward_all_layers(const ToyModel& model, std::span<const std::size_t> ids,
                                           ForwardTrace* trace) {
  const ToyModelConfig& c = model.config;
  if (ids.size() > c.max_len) {
    fail(Errc::sequence_too_long, "sequence of " + std::to_string(ids.size()) + " tokens exceeds max_len " +
                                      std::to_string(c.max_len));
  }
  if (ids.size() < 2) fail(Errc::invalid_argument, "sequence needs at least two tokens");
  const std::size_t L = ids.size(), d = c.d_model;
  Dense x(L, d);
  for (std::size_t i = 0; i < L; ++i) {
    if (ids[i] >= c.vocab_size) {
      fail(Errc::token_out_of_range, "token id " + std::to_string(ids[i]) + " at position " + std::to_string(i));
    }
    auto row = x.row(i);
    const auto emb = model.token_embedding.row(ids[i]);
    std::copy(emb.begin(), emb.end(), row.begin());
    if (c.positional == Positional::learned_random) kernels::axpy(1.0, model.position_embedding.row(i), row);
  }
  if (c.layer_norm) layer_norm_rows(x, model.norm_embed);

  std::vector<ReprMatrix> out;
  out.reserve(c.n_layers + 1);
  out.push_back(to_repr(x));
  if (trace) trace->attention.assign(c.n_layers, {});

  for (std::size_t l = 0; l < c.n_layers; ++l) {
    const EncoderLayer& layer = model.layers[l];
    const Dense attn = self_attention(x, layer, c.n_heads, trace ? &trace->attention[l] : nullptr);
    kernels::axpy(1.0, attn.data, x.data);
    if (c.layer_norm) layer_norm_rows(x, layer.norm_attn);

    Dense hidden = project(x, layer.w1);
    for (double& h : hidden.data) h = activate(h, c.activation);
    const Dense ffn = project(hidden, layer.w2);
    kernels::axpy(1.0, ffn.data, x.data);
    if (c.layer_norm) layer_norm_rows(x, layer.norm_ffn);
    out.push_back(to_repr(x));
  }
  return out;
}

std::vector<TokenSequence> random_sequences(std::size_t n, std::size_t vocab, std::size_t len_min,
                                            std::size_t len_max, bool distinct, std::uint64_t seed) {
  if (len_min < 2 || len_min > len_max) fail(Errc::invalid_argument, "need 2 <= len_min <= len_max");
  if (distinct && len_max > vocab) fail(Errc::invalid_argument, "distinct sequences longer than the vocabulary");
  std::vector<TokenSequence> seqs(n);
  for (std::size_t s = 0; s < n; ++s) {
    rng::Stream stream(seed, rng::stream_id(s, rng::Purpose::tokens));
    const std::size_t L = len_min + static_cast<std::size_t>(stream.below(len_max - len_min + 1));
    TokenSequence& ids = seqs[s];
    if (distinct) {
      // partial Fisher-Yates over a lazily materialized permutation
      std::vector<std::size_t> pool(vocab);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t i = 0; i < L; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(stream.below(vocab - i));
        std::swap(pool[i], pool[j]);
        ids.push_back(pool[i]);
      }
    } else {
      for (std::size_t i = 0; i < L; ++i) ids.push_back(static_cast<std::size_t>(stream.below(vocab)));
    }
  }
  return seqs;
}

std::vector<std::vector<ReprMatrix>> encode_corpus(const ToyModel& model, std::span<const TokenSequence> corpus,
                                                   std::size_t jobs) {
  std::vector<std::vector<ReprMatrix>> by_seq(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t s) { by_seq[s] = forward_all_layers(model, corpus[s]); });
  std::vector<std::vector<ReprMatrix>> by_layer(model.config.n_layers + 1);
  for (auto& layers : by_seq) {
    for (std::size_t k = 0; k < layers.size(); ++k) by_layer[k].push_back(std::move(layers[k]));
  }
  return by_layer;
}

LayerSweep layer_sweep(std::span<const std::vector<ReprMatrix>> per_layer, PcaConvention conv, std::size_t jobs) {
  LayerSweep sweep;
  sweep.convention = conv;
  for (std::size_t k = 0; k < per_layer.size(); ++k) {
    sweep.per_layer.push_back(batch_property(per_layer[k], conv, true, "layer " + std::to_string(k), jobs));
  }
  return sweep;
}

LayerSweep layer_sweep(const ToyModel& model, std::span<const TokenSequence> corpus, PcaConvention conv,
                       std::size_t jobs) {
  if (corpus.empty()) fail(Errc::empty_corpus, "layer sweep over an empty corpus");
  const auto per_layer = encode_corpus(model, corpus, jobs);
  return layer_sweep(per_layer, conv, jobs);
}

std::vector<ReprMatrix> mix_random_layers(std::span<const std::vector<ReprMatrix>> per_layer, std::size_t layer_lo,
                                          std::size_t layer_hi, std::uint64_t seed) {
  if (layer_lo > layer_hi || layer_hi >= per_layer.size()) {
    fail(Errc::range_invalid, "layer range [" + std::to_string(layer_lo) + ", " + std::to_string(layer_hi) +
                                  "] outside 0.." + std::to_string(per_layer.size() == 0 ? 0 : per_layer.size() - 1));
  }
  const std::size_t n_seq = per_layer[layer_lo].size();
  for (std::size_t k = layer_lo; k <= layer_hi; ++k) {
    if (per_layer[k].size() != n_seq) fail(Errc::dimension_mismatch, "layers hold different sequence counts");
  }
  std::vector<ReprMatrix> out;
  out.reserve(n_seq);
  const std::size_t span_layers = layer_hi - layer_lo + 1;
  for (std::size_t s = 0; s < n_seq; ++s) {
    rng::Stream stream(seed, rng::stream_id(s, rng::Purpose::layer_mix));
    const ReprMatrix& ref = per_layer[layer_lo][s];
    std::vector<double> data;
    data.reserve(ref.dim() * ref.tokens());
    for (std::size_t i = 0; i < ref.tokens(); ++i) {
      const std::size_t k = layer_lo + static_cast<std::size_t>(stream.below(span_layers));
      const ReprMatrix& src = per_layer[k][s];
      if (src.dim() != ref.dim() || src.tokens() != ref.tokens()) {
        fail(Errc::dimension_mismatch, "sequence " + std::to_string(s) + " differs in shape across layers");
      }
      const auto col = src.column(i);
      data.insert(data.end(), col.begin(), col.end());
    }
    out.emplace_back(ref.dim(), ref.tokens(), std::move(data));
  }
  return out;
}

std::vector<ReprMatrix> shuffle_cross_sequence(std::span<const ReprMatrix> corpus, std::uint64_t seed) {
  if (corpus.empty()) fail(Errc::empty_corpus, "shuffle of an empty corpus");
  const std::size_t d = corpus.front().dim();
  std::vector<std::span<const double>> columns;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (corpus[s].dim() != d) fail(Errc::dimension_mismatch, "matrix " + std::to_string(s) + " has a different d");
    for (std::size_t i = 0; i < corpus[s].tokens(); ++i) columns.push_back(corpus[s].column(i));
  }
  rng::Stream stream(seed, rng::stream_id(0, rng::Purpose::shuffle));
  stream.shuffle(std::span(columns));
  std::vector<ReprMatrix> out;
  out.reserve(corpus.size());
  std::size_t next = 0;
  for (const auto& m : corpus) {
    std::vector<double> data;
    data.reserve(d * m.tokens());
    for (std::size_t i = 0; i < m.tokens(); ++i, ++next) data.insert(data.end(), columns[next].begin(), columns[next].end());
    out.emplace_back(d, m.tokens(), std::move(data));
  }
  return out;
}

}  // namespace repgeo
