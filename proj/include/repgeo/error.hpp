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

#include <stdexcept>
#include <string>
#include <string_view>

namespace repgeo {

enum class Errc {
  invalid_argument,
  zero_vector,
  length_mismatch,
  degenerate,
  size_exceeded,
  dimension_mismatch,
  average_zero,
  empty_corpus,
  constant_dimension,
  not_standardized,
  insufficient_data,
  negative_entry,
  config_invalid,
  token_out_of_range,
  sequence_too_long,
  range_invalid,
  parse_error,
  io_error,
  inconsistent_dimension,
  duplicate_word,
  too_short_after_oov,
  unknown_word,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library. `code()` identifies the condition,
/// `what()` carries a human-readable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace repgeo
