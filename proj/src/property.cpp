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

#include "repgeo/property.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repgeo/error.hpp"
#include "repgeo/kernels.hpp"
#include "repgeo/parallel.hpp"

namespace repgeo {
namespace {

// Dominant eigenpair of a PSD Gram matrix. The matrix is normalized by its
// largest diagonal entry so the residual tolerance is scale-free.
EigenPair dominant_of_gram(const SymMatrix& gram) {
  double scale = 0.0;
  for (std::size_t i = 0; i < gram.size(); ++i) scale = std::max(scale, gram(i, i));
  if (!(scale > 0.0)) fail(Errc::degenerate, "matrix is zero after centering");
  const SymMatrix normalized = gram.scaled(1.0 / scale);
  EigenPair top = top_eigenpair(normalized);
  if (!top.converged && normalized.size() <= kJacobiMaxSize) {
    top = full_symmetric_eigen(normalized).front();
  }
  top.value *= scale;
  return top;
}

// p = X w normalized, where X is d x L column-major.
Vector combine_columns(const ReprMatrix& x, const Vector& w) {
  std::vector<double> p(x.dim(), 0.0);
  for (std::size_t i = 0; i < x.tokens(); ++i) kernels::axpy(w[i], x.column(i), p);
  const double n = std::sqrt(kernels::dot(p, p));
  if (!(n > 0.0)) fail(Errc::degenerate, "principal direction vanished");
  kernels::scale(1.0 / n, p);
  canonicalize_sign(p);
  return Vector(std::move(p));
}

SymMatrix gram(const ReprMatrix& x, double divisor) {
  const std::size_t L = x.tokens();
  SymMatrix g(L);
  const double inv = 1.0 / divisor;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i; j < L; ++j) g.set(i, j, kernels::dot(x.column(i), x.column(j)) * inv);
  }
  return g;
}

// d x d route: X X^T / divisor.
SymMatrix outer_gram(const ReprMatrix& x, double divisor) {
  const std::size_t d = x.dim(), L = x.tokens();
  std::vector<std::vector<double>> rows(d, std::vector<double>(L));
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < d; ++j) rows[j][i] = x(j, i);
  }
  SymMatrix g(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j; k < d; ++k) g.set(j, k, kernels::dot(rows[j], rows[k]) / divisor);
  }
  return g;
}

PrincipalComponent pc_of(const ReprMatrix& x, double divisor) {
  if (x.tokens() <= x.dim()) {
    const EigenPair top = dominant_of_gram(gram(x, divisor));
    return {combine_columns(x, top.vector), top.value};
  }
  const EigenPair top = dominant_of_gram(outer_gram(x, divisor));
  return {top.vector, top.value};
}

ReprMatrix subtract_average(const ReprMatrix& r) {
  const Vector mean = average_vector(r);
  std::vector<double> data(r.data().begin(), r.data().end());
  for (std::size_t i = 0; i < r.tokens(); ++i) {
    std::span<double> col(data.data() + i * r.dim(), r.dim());
    kernels::axpy(-1.0, mean.span(), col);
  }
  return ReprMatrix(r.dim(), r.tokens(), std::move(data));
}

bool is_degenerate(const Error& e) { return e.code() == Errc::degenerate || e.code() == Errc::average_zero; }

}  // namespace

std::string_view convention_tag(PcaConvention c) noexcept {
  switch (c) {
    case PcaConvention::token_centered: return "A";
    case PcaConvention::dimension_centered: return "B";
    case PcaConvention::uncentered: return "C";
  }
  return "?";
}

std::optional<PcaConvention> parse_convention(std::string_view tag) noexcept {
  if (tag == "A" || tag == "a") return PcaConvention::token_centered;
  if (tag == "B" || tag == "b") return PcaConvention::dimension_centered;
  if (tag == "C" || tag == "c") return PcaConvention::uncentered;
  return std::nullopt;
}

Vector average_vector(const ReprMatrix& r) {
  std::vector<double> mean(r.dim(), 0.0);
  for (std::size_t i = 0; i < r.tokens(); ++i) kernels::axpy(1.0, r.column(i), mean);
  kernels::scale(1.0 / static_cast<double>(r.tokens()), mean);
  return Vector(std::move(mean));
}

PrincipalComponent first_pc(const ReprMatrix& r, PcaConvention conv) {
  switch (conv) {
    case PcaConvention::token_centered:
      return pc_of(subtract_average(r), static_cast<double>(r.tokens() - 1));
    case PcaConvention::dimension_centered: {
      const ReprMatrix centered = center_columns(r);
      const EigenPair top = dominant_of_gram(token_covariance(centered, Centering::none));
      return {combine_columns(centered, top.vector), top.value};
    }
    case PcaConvention::uncentered:
      return pc_of(r, 1.0);
  }
  fail(Errc::invalid_argument, "unknown convention");
}

PropertyResult property_cosine(const ReprMatrix& r, PcaConvention conv) {
  const Vector avg = average_vector(r);
  if (avg.norm() == 0.0) fail(Errc::average_zero, "average representation is the zero vector");
  const PrincipalComponent pc = first_pc(r, conv);
  PropertyResult out;
  out.abs_cos = std::abs(cosine(avg, pc.direction));
  out.convention = conv;
  out.lambda1 = pc.lambda1;
  out.tokens = r.tokens();
  out.dim = r.dim();
  return out;
}

BatchSummary summarize(std::span<const std::optional<PropertyResult>> results, std::string scenario) {
  BatchSummary s;
  s.scenario = std::move(scenario);
  double total = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    if (!r) {
      ++s.skipped;
      continue;
    }
    total += r->abs_cos;
    lo = std::min(lo, r->abs_cos);
    ++s.n_tests;
  }
  if (s.n_tests == 0) fail(Errc::empty_corpus, "no non-degenerate matrices to summarize");
  s.average = total / static_cast<double>(s.n_tests);
  s.min = lo;
  return s;
}

BatchSummary batch_property_generated(std::size_t n, const std::function<ReprMatrix(std::size_t)>& make,
                                      PcaConvention conv, bool skip_degenerate, std::string scenario,
                                      std::size_t jobs) {
  if (n == 0) fail(Errc::empty_corpus, "batch of zero matrices");
  std::vector<std::optional<PropertyResult>> results(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const ReprMatrix r = make(i);
    try {
      results[i] = property_cosine(r, conv);
    } catch (const Error& e) {
      if (!skip_degenerate || !is_degenerate(e)) throw;
    }
  });
  return summarize(results, std::move(scenario));
}

std::vector<std::optional<PropertyResult>> property_each(std::span<const ReprMatrix> corpus, PcaConvention conv,
                                                         bool skip_degenerate, std::size_t jobs) {
  std::vector<std::optional<PropertyResult>> results(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    try {
      results[i] = property_cosine(corpus[i], conv);
    } catch (const Error& e) {
      if (!skip_degenerate || !is_degenerate(e)) throw;
    }
  });
  return results;
}

BatchSummary batch_property(std::span<const ReprMatrix> corpus, PcaConvention conv, bool skip_degenerate,
                            std::string scenario, std::size_t jobs) {
  if (corpus.empty()) fail(Errc::empty_corpus, "batch_property on an empty corpus");
  const auto results = property_each(corpus, conv, skip_degenerate, jobs);
  return summarize(results, std::move(scenario));
}

}  // namespace repgeo
