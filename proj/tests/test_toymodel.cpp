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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "repgeo/error.hpp"
#include "repgeo/toymodel.hpp"
#include "support.hpp"

using namespace repgeo;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<Errc>(-1);
}

ToyModelConfig small_config() {
  ToyModelConfig c;
  c.d_model = 16;
  c.n_layers = 3;
  c.n_heads = 2;
  c.d_ff = 24;
  c.vocab_size = 50;
  c.max_len = 32;
  c.seed = 3;
  return c;
}

using Mat = std::vector<std::vector<double>>;  // [token][feature]

Mat matmul_t(const Mat& x, const Dense& w) {
  Mat y(x.size(), std::vector<double>(w.rows, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t o = 0; o < w.rows; ++o) {
      for (std::size_t k = 0; k < w.cols; ++k) y[i][o] += x[i][k] * w(o, k);
    }
  }
  return y;
}

void norm_rows(Mat& x, const LayerNormParams& p) {
  for (auto& row : x) {
    double mean = 0, var = 0;
    for (double v : row) mean += v / row.size();
    for (double v : row) var += (v - mean) * (v - mean) / row.size();
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean) / std::sqrt(var + 1e-12) * p.gain[j] + p.bias[j];
  }
}

// Step-by-step scalar trace of the post-norm encoder.
std::vector<Mat> trace_forward(const ToyModel& m, const std::vector<std::size_t>& ids) {
  const auto& c = m.config;
  const std::size_t L = ids.size(), d = c.d_model, dk = d / c.n_heads;
  Mat x(L, std::vector<double>(d));
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x[i][j] = m.token_embedding(ids[i], j);
      if (c.positional == Positional::learned_random) x[i][j] += m.position_embedding(i, j);
    }
  }
  if (c.layer_norm) norm_rows(x, m.norm_embed);
  std::vector<Mat> out{x};
  for (const auto& layer : m.layers) {
    const Mat q = matmul_t(x, layer.wq), k = matmul_t(x, layer.wk), v = matmul_t(x, layer.wv);
    Mat ctx(L, std::vector<double>(d, 0.0));
    for (std::size_t h = 0; h < c.n_heads; ++h) {
      for (std::size_t i = 0; i < L; ++i) {
        std::vector<double> s(L);
        double z = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
          double dot = 0.0;
          for (std::size_t t = h * dk; t < (h + 1) * dk; ++t) dot += q[i][t] * k[j][t];
          s[j] = std::exp(dot / std::sqrt(static_cast<double>(dk)));
          z += s[j];
        }
        for (std::size_t j = 0; j < L; ++j) {
          for (std::size_t t = h * dk; t < (h + 1) * dk; ++t) ctx[i][t] += s[j] / z * v[j][t];
        }
      }
    }
    const Mat attn = matmul_t(ctx, layer.wo);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = 0; j < d; ++j) x[i][j] += attn[i][j];
    if (c.layer_norm) norm_rows(x, layer.norm_attn);
    Mat hidden = matmul_t(x, layer.w1);
    for (auto& row : hidden)
      for (double& hv : row) hv = std::max(hv, 0.0);
    const Mat ffn = matmul_t(hidden, layer.w2);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = 0; j < d; ++j) x[i][j] += ffn[i][j];
    if (c.layer_norm) norm_rows(x, layer.norm_ffn);
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("init is deterministic in the seed") {
  const auto c = small_config();
  CHECK(same_parameters(init_model(c), init_model(c)));
  auto other = c;
  other.seed = 4;
  CHECK_FALSE(same_parameters(init_model(c), init_model(other)));
}

TEST_CASE("config validation") {
  auto c = small_config();
  c.n_heads = 3;
  CHECK(code_of([&] { init_model(c); }) == Errc::config_invalid);
  c = small_config();
  c.d_ff = 0;
  CHECK(code_of([&] { init_model(c); }) == Errc::config_invalid);
  c = small_config();
  c.init.scale = 0.0;
  CHECK(code_of([&] { init_model(c); }) == Errc::config_invalid);
}

TEST_CASE("gaussian(0.02) embedding entries have std 0.02") {
  ToyModelConfig c;
  c.init = {InitKind::gaussian, 0.02};
  c.n_layers = 1;
  const ToyModel m = init_model(c);
  double s = 0, ss = 0;
  const auto& e = m.token_embedding.data;
  for (double x : e) {
    s += x;
    ss += x * x;
  }
  const double n = static_cast<double>(e.size());
  const double sd = std::sqrt(ss / n - (s / n) * (s / n));
  CHECK(std::abs(sd - 0.02) <= 0.05 * 0.02);
}

TEST_CASE("uniform init stays inside the half-width") {
  auto c = small_config();
  c.init = {InitKind::uniform, 0.1};
  const ToyModel m = init_model(c);
  for (double x : m.layers[0].w1.data) {
    CHECK(x >= -0.1);
    CHECK(x <= 0.1);
  }
}

TEST_CASE("forward pass matches a scalar trace on a hand-sized model") {
  ToyModelConfig c;
  c.d_model = 4;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 3;
  c.vocab_size = 5;
  c.max_len = 4;
  c.init = {InitKind::gaussian, 0.7};
  c.seed = 11;
  for (const bool ln : {true, false}) {
    c.layer_norm = ln;
    const ToyModel m = init_model(c);
    const std::vector<std::size_t> ids{3, 1};
    const auto got = forward_all_layers(m, ids);
    const auto want = trace_forward(m, ids);
    REQUIRE(got.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(got[k](j, i) == doctest::Approx(want[k][i][j]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("forward pass matches the trace on the small default-shaped model") {
  const ToyModel m = init_model(small_config());
  const std::vector<std::size_t> ids{4, 9, 9, 0, 31, 2};
  const auto got = forward_all_layers(m, ids);
  const auto want = trace_forward(m, ids);
  for (std::size_t k = 0; k < got.size(); ++k) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < 16; ++j) CHECK(got[k](j, i) == doctest::Approx(want[k][i][j]).epsilon(1e-10));
    }
  }
}

TEST_CASE("layer-normed outputs are zero-mean and unit-variance per token") {
  const ToyModel m = init_model(small_config());
  const auto layers = forward_all_layers(m, std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(layers.size() == 4);
  for (const auto& r : layers) {
    for (std::size_t i = 0; i < r.tokens(); ++i) {
      double mean = 0, var = 0;
      for (double x : r.column(i)) mean += x / r.dim();
      for (double x : r.column(i)) var += (x - mean) * (x - mean) / r.dim();
      CHECK(std::abs(mean) <= 1e-12);
      CHECK(std::abs(var - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("identical tokens without positions give identical columns") {
  auto c = small_config();
  c.positional = Positional::none;
  const ToyModel m = init_model(c);
  for (const auto& r : forward_all_layers(m, std::vector<std::size_t>{7, 7})) {
    for (std::size_t j = 0; j < r.dim(); ++j) CHECK(r(j, 0) == r(j, 1));
  }
}

TEST_CASE("attention rows are stochastic") {
  const ToyModel m = init_model(small_config());
  ForwardTrace trace;
  forward_all_layers(m, std::vector<std::size_t>{1, 5, 9, 13, 17, 21, 25}, &trace);
  REQUIRE(trace.attention.size() == 3);
  for (const auto& layer : trace.attention) {
    REQUIRE(layer.size() == 2);
    for (const auto& p : layer) {
      for (std::size_t i = 0; i < p.rows; ++i) {
        double s = 0.0;
        for (double x : p.row(i)) s += x;
        CHECK(std::abs(s - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("forward pass errors") {
  const ToyModel m = init_model(small_config());
  CHECK(code_of([&] { forward_all_layers(m, std::vector<std::size_t>{1, 50}); }) == Errc::token_out_of_range);
  CHECK(code_of([&] { forward_all_layers(m, std::vector<std::size_t>(33, 1)); }) == Errc::sequence_too_long);
}

TEST_CASE("random_sequences") {
  const auto a = random_sequences(20, 30, 4, 9, true, 1);
  const auto b = random_sequences(20, 30, 4, 9, true, 1);
  CHECK(a == b);
  for (const auto& s : a) {
    CHECK(s.size() >= 4);
    CHECK(s.size() <= 9);
    std::vector<std::size_t> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (auto id : s) CHECK(id < 30);
  }
  CHECK(code_of([] { random_sequences(1, 5, 6, 6, true, 0); }) == Errc::invalid_argument);
}

TEST_CASE("layer sweep length, determinism across workers") {
  const ToyModel m = init_model(small_config());
  const auto corpus = random_sequences(12, 50, 4, 10, false, 2);
  const auto a = layer_sweep(m, corpus, kDefaultConvention, 1);
  const auto b = layer_sweep(m, corpus, kDefaultConvention, 3);
  CHECK(a.per_layer.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(a.per_layer[k].average == b.per_layer[k].average);
    CHECK(a.per_layer[k].min == b.per_layer[k].min);
  }
  CHECK(code_of([&] { layer_sweep(m, std::vector<TokenSequence>{}, kDefaultConvention); }) == Errc::empty_corpus);
}

TEST_CASE("lookup layer with i.i.d. embeddings and distinct tokens is far from the property") {
  ToyModelConfig c;
  c.n_layers = 1;
  c.positional = Positional::none;
  const ToyModel m = init_model(c);
  const auto corpus = random_sequences(100, c.vocab_size, 8, 64, true, 5);
  const auto sweep = layer_sweep(m, corpus, kDefaultConvention, 2);
  CHECK(sweep.per_layer[0].average <= 0.3);
}

TEST_CASE("abs_cos is invariant under relabeling token ids") {
  const ToyModel m = init_model(small_config());
  const std::size_t V = m.config.vocab_size;
  std::vector<std::size_t> perm(V);
  for (std::size_t t = 0; t < V; ++t) perm[t] = (t * 7 + 3) % V;  // 7 is coprime to 50
  ToyModel relabeled = m;
  for (std::size_t t = 0; t < V; ++t) {
    for (std::size_t j = 0; j < m.config.d_model; ++j) relabeled.token_embedding(perm[t], j) = m.token_embedding(t, j);
  }
  auto corpus = random_sequences(10, V, 4, 12, false, 8);
  auto mapped = corpus;
  for (auto& s : mapped)
    for (auto& id : s) id = perm[id];
  const auto a = layer_sweep(m, corpus, kDefaultConvention);
  const auto b = layer_sweep(relabeled, mapped, kDefaultConvention);
  for (std::size_t k = 0; k < a.per_layer.size(); ++k) CHECK(a.per_layer[k].average == b.per_layer[k].average);
}

TEST_CASE("mix_random_layers") {
  const ToyModel m = init_model(small_config());
  const auto corpus = random_sequences(8, 50, 3, 9, false, 4);
  const auto layers = encode_corpus(m, corpus, 2);
  const auto same = mix_random_layers(layers, 2, 2, 1);
  CHECK(same == layers[2]);
  const auto mixed = mix_random_layers(layers, 1, 3, 1);
  for (std::size_t s = 0; s < mixed.size(); ++s) {
    for (std::size_t i = 0; i < mixed[s].tokens(); ++i) {
      const auto col = mixed[s].column(i);
      bool found = false;
      for (std::size_t k = 1; k <= 3; ++k) {
        const auto ref = layers[k][s].column(i);
        found |= std::equal(col.begin(), col.end(), ref.begin());
      }
      CHECK(found);
    }
  }
  CHECK(mix_random_layers(layers, 1, 3, 1) == mixed);
  CHECK(code_of([&] { mix_random_layers(layers, 3, 1, 0); }) == Errc::range_invalid);
  CHECK(code_of([&] { mix_random_layers(layers, 0, 4, 0); }) == Errc::range_invalid);
}

TEST_CASE("shuffle_cross_sequence conserves columns and lengths") {
  const auto corpus = std::vector<ReprMatrix>{test::gaussian_matrix(5, 4, 1), test::gaussian_matrix(5, 7, 2),
                                              test::gaussian_matrix(5, 2, 3)};
  const auto out = shuffle_cross_sequence(corpus, 9);
  REQUIRE(out.size() == 3);
  auto collect = [](const std::vector<ReprMatrix>& c) {
    std::vector<std::vector<double>> cols;
    for (const auto& m : c)
      for (std::size_t i = 0; i < m.tokens(); ++i) cols.emplace_back(m.column(i).begin(), m.column(i).end());
    std::sort(cols.begin(), cols.end());
    return cols;
  };
  CHECK(collect(corpus) == collect(out));
  for (std::size_t s = 0; s < 3; ++s) CHECK(out[s].tokens() == corpus[s].tokens());
  CHECK(out != corpus);

  const auto a = feature_covariance(corpus), b = feature_covariance(out);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(b(i, j) == doctest::Approx(a(i, j)).epsilon(1e-12));

  const std::vector<ReprMatrix> single{test::gaussian_matrix(4, 6, 5)};
  CHECK(collect(shuffle_cross_sequence(single, 1)) == collect(single));

  const std::vector<ReprMatrix> mixed{test::gaussian_matrix(4, 3, 1), test::gaussian_matrix(5, 3, 1)};
  CHECK(code_of([&] { shuffle_cross_sequence(mixed, 0); }) == Errc::dimension_mismatch);
}
