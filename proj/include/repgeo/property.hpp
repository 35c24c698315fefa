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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repgeo/linalg.hpp"

namespace repgeo {

/// How the first principal component p of a representation matrix is defined.
enum class PcaConvention {
  /// Tokens are samples: subtract the average representation from every
  /// column, p = dominant eigenvector of the d x d sample covariance.
  token_centered,
  /// Dimensions are samples: center each column over its d entries, take the
  /// dominant eigenvector w of the L x L token covariance, p = R_centered w.
  dimension_centered,
  /// No centering: p = dominant left singular direction of R.
  uncentered,
};

inline constexpr PcaConvention kDefaultConvention = PcaConvention::dimension_centered;

std::string_view convention_tag(PcaConvention c) noexcept;  // "A", "B", "C"
std::optional<PcaConvention> parse_convention(std::string_view tag) noexcept;

struct PropertyResult {
  double abs_cos = 0.0;
  PcaConvention convention = kDefaultConvention;
  double lambda1 = 0.0;
  std::size_t tokens = 0;
  std::size_t dim = 0;
};

struct BatchSummary {
  std::string scenario;
  std::size_t n_tests = 0;
  double average = 0.0;
  double min = 0.0;
  std::size_t skipped = 0;
};

struct PrincipalComponent {
  Vector direction;  // unit norm
  double lambda1 = 0.0;
};

Vector average_vector(const ReprMatrix& r);

PrincipalComponent first_pc(const ReprMatrix& r, PcaConvention conv);

/// |cos(average, first principal component)|. Throws AverageZero when the
/// average representation vanishes.
PropertyResult property_cosine(const ReprMatrix& r, PcaConvention conv);

/// Average and minimum abs_cos over a corpus. With skip_degenerate, matrices
/// whose average or centered matrix vanishes are counted in `skipped` and
/// excluded; otherwise the first such error propagates.
BatchSummary batch_property(std::span<const ReprMatrix> corpus, PcaConvention conv, bool skip_degenerate,
                            std::string scenario = {}, std::size_t jobs = 1);

/// Same reduction over matrices produced on demand, so large synthetic
/// batches never need to be held in memory. `make(i)` must be safe to call
/// concurrently for distinct i.
BatchSummary batch_property_generated(std::size_t n, const std::function<ReprMatrix(std::size_t)>& make,
                                      PcaConvention conv, bool skip_degenerate, std::string scenario = {},
                                      std::size_t jobs = 1);

/// Per-matrix results (std::nullopt for degenerate matrices when skipping).
std::vector<std::optional<PropertyResult>> property_each(std::span<const ReprMatrix> corpus, PcaConvention conv,
                                                         bool skip_degenerate, std::size_t jobs = 1);

BatchSummary summarize(std::span<const std::optional<PropertyResult>> results, std::string scenario);

}  // namespace repgeo
