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

// On-disk corpora.
//
// Text bundle (JSON lines):
//   line 1: {"format":"repgeo-bundle","version":1,"d":D,"metadata":{...}}
//   then one object per sentence: {"id":"...","L":L,"values":[...]} with the
//   d x L matrix in row-major order (values[j * L + i] = dimension j of token i).
//
// Binary bundle (little-endian):
//   "RGB1" | u32 d | u32 sentence count |
//   per sentence: u32 id length | id bytes | u32 L | d*L f64, column-major |
//   optional trailer: u32 metadata count | (u32 len | key bytes | u32 len | value bytes)*

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "repgeo/linalg.hpp"

namespace repgeo {

struct SentenceRepr {
  std::string id;
  ReprMatrix matrix;
  friend bool operator==(const SentenceRepr&, const SentenceRepr&) = default;
};

struct ReprBundle {
  std::size_t d = 0;
  std::vector<SentenceRepr> sentences;
  std::map<std::string, std::string> metadata;

  // Shared d and unique ids; throws DimensionMismatch / InvalidArgument.
  void validate() const;
  std::vector<ReprMatrix> matrices() const;

  friend bool operator==(const ReprBundle&, const ReprBundle&) = default;
};

enum class BundleEncoding { text, binary };

// ".bin" selects binary, anything else text.
BundleEncoding encoding_for(const std::filesystem::path& path);

// Detects the encoding from the leading magic.
ReprBundle read_bundle(const std::filesystem::path& path);
void write_bundle(const ReprBundle& bundle, const std::filesystem::path& path, BundleEncoding encoding);
inline void write_bundle(const ReprBundle& bundle, const std::filesystem::path& path) {
  write_bundle(bundle, path, encoding_for(path));
}

ReprBundle bundle_from_matrices(std::vector<ReprMatrix> matrices, std::map<std::string, std::string> metadata = {},
                                const std::string& id_prefix = "s");

/// Static word vectors, in file order.
struct WordVectorTable {
  std::size_t d = 0;
  std::vector<std::string> words;
  std::vector<Vector> vectors;
  std::unordered_map<std::string, std::size_t> index;

  const Vector* find(const std::string& word) const;
};

/// Whitespace text format: `word v1 ... vd` per line. With expect_header the
/// first line is `count dim` (word2vec text format).
WordVectorTable parse_word_vectors(const std::filesystem::path& path, bool expect_header);
void write_word_vectors(const WordVectorTable& table, const std::filesystem::path& path, bool with_header);

enum class OovPolicy { skip, error };

struct SentenceConversion {
  ReprBundle bundle;
  std::size_t oov_skipped = 0;
};

using TokenizedSentence = std::vector<std::string>;

SentenceConversion sentences_to_repr(const WordVectorTable& table, const std::vector<TokenizedSentence>& sentences,
                                     OovPolicy oov);

/// One sentence per line, tokens separated by whitespace; blank lines skipped.
std::vector<TokenizedSentence> read_tokenized_sentences(const std::filesystem::path& path);

}  // namespace repgeo
