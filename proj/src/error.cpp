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

#include "repgeo/error.hpp"

namespace repgeo {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::degenerate: return "Degenerate";
    case Errc::size_exceeded: return "SizeExceeded";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::average_zero: return "AverageZero";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::constant_dimension: return "ConstantDimension";
    case Errc::not_standardized: return "NotStandardized";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::negative_entry: return "NegativeEntry";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::token_out_of_range: return "TokenOutOfRange";
    case Errc::sequence_too_long: return "SequenceTooLong";
    case Errc::range_invalid: return "RangeInvalid";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    case Errc::inconsistent_dimension: return "InconsistentDimension";
    case Errc::duplicate_word: return "DuplicateWord";
    case Errc::too_short_after_oov: return "TooShortAfterOov";
    case Errc::unknown_word: return "UnknownWord";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace repgeo
