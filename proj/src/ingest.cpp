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

#include "repgeo/ingest.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "repgeo/error.hpp"

namespace repgeo {
namespace {

using nlohmann::json;

constexpr std::array<char, 4> kMagic{'R', 'G', 'B', '1'};

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  return out;
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_string(std::string& buf, const std::string& s) {
  put_u32(buf, static_cast<std::uint32_t>(s.size()));
  buf += s;
}

class ByteReader {
 public:
  ByteReader(std::string data, std::string source) : data_(std::move(data)), source_(std::move(source)) {}

  bool at_end() const { return pos_ == data_.size(); }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    pos_ += 8;
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::string str() { return bytes(u32()); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      fail(Errc::parse_error, source_ + ": truncated binary bundle at offset " + std::to_string(pos_));
    }
  }

  std::string data_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ReprBundle read_binary(std::string data, const std::string& source) {
  ByteReader r(std::move(data), source);
  r.bytes(4);
  ReprBundle b;
  b.d = r.u32();
  const std::uint32_t count = r.u32();
  for (std::uint32_t s = 0; s < count; ++s) {
    std::string id = r.str();
    const std::uint32_t L = r.u32();
    std::vector<double> values(b.d * L);
    for (double& v : values) v = std::bit_cast<double>(r.u64());
    try {
      b.sentences.push_back({std::move(id), ReprMatrix(b.d, L, std::move(values))});
    } catch (const Error& e) {
      fail(Errc::parse_error, source + ": sentence " + std::to_string(s) + ": " + e.what());
    }
  }
  if (!r.at_end()) {
    const std::uint32_t n_meta = r.u32();
    for (std::uint32_t m = 0; m < n_meta; ++m) {
      std::string key = r.str();
      b.metadata[std::move(key)] = r.str();
    }
    if (!r.at_end()) fail(Errc::parse_error, source + ": trailing bytes after metadata");
  }
  return b;
}

ReprBundle read_text(const std::string& data, const std::string& source) {
  std::istringstream in(data);
  std::string line;
  std::size_t line_no = 0;
  ReprBundle b;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(Errc::parse_error, source + ":" + std::to_string(line_no) + ": offset " + std::to_string(e.byte) + ": " +
                                  e.what());
    }
    try {
      if (!have_header) {
        if (obj.value("format", "") != "repgeo-bundle") {
          fail(Errc::parse_error, source + ":" + std::to_string(line_no) + ": missing bundle header");
        }
        b.d = obj.at("d").get<std::size_t>();
        if (obj.contains("metadata")) b.metadata = obj.at("metadata").get<std::map<std::string, std::string>>();
        have_header = true;
        continue;
      }
      std::string id = obj.at("id").get<std::string>();
      const auto L = obj.at("L").get<std::size_t>();
      const auto row_major = obj.at("values").get<std::vector<double>>();
      if (row_major.size() != b.d * L) {
        fail(Errc::dimension_mismatch, "sentence '" + id + "' has " + std::to_string(row_major.size()) +
                                           " values, expected d*L = " + std::to_string(b.d * L));
      }
      std::vector<double> col_major(row_major.size());
      for (std::size_t j = 0; j < b.d; ++j) {
        for (std::size_t i = 0; i < L; ++i) col_major[i * b.d + j] = row_major[j * L + i];
      }
      b.sentences.push_back({std::move(id), ReprMatrix(b.d, L, std::move(col_major))});
    } catch (const json::exception& e) {
      fail(Errc::parse_error, source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == Errc::dimension_mismatch) throw;
      fail(Errc::parse_error, source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) fail(Errc::parse_error, source + ": empty bundle file");
  return b;
}

std::string shortest(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto res = std::from_chars(first, tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    fail(Errc::parse_error, where + ": not a number: '" + tok + "'");
  }
  return v;
}

}  // namespace

void ReprBundle::validate() const {
  std::set<std::string> ids;
  for (const auto& s : sentences) {
    if (s.matrix.dim() != d) {
      fail(Errc::dimension_mismatch, "sentence '" + s.id + "' has d=" + std::to_string(s.matrix.dim()) +
                                         ", bundle d=" + std::to_string(d));
    }
    if (!ids.insert(s.id).second) fail(Errc::invalid_argument, "duplicate sentence id '" + s.id + "'");
  }
}

std::vector<ReprMatrix> ReprBundle::matrices() const {
  std::vector<ReprMatrix> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.matrix);
  return out;
}

BundleEncoding encoding_for(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? BundleEncoding::binary : BundleEncoding::text;
}

ReprBundle read_bundle(const std::filesystem::path& path) {
  std::string data = slurp(path);
  const std::string source = path.string();
  ReprBundle b = data.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), data.begin())
                     ? read_binary(std::move(data), source)
                     : read_text(data, source);
  b.validate();
  return b;
}

void write_bundle(const ReprBundle& bundle, const std::filesystem::path& path, BundleEncoding encoding) {
  bundle.validate();
  std::string buf;
  if (encoding == BundleEncoding::binary) {
    buf.append(kMagic.begin(), kMagic.end());
    put_u32(buf, static_cast<std::uint32_t>(bundle.d));
    put_u32(buf, static_cast<std::uint32_t>(bundle.sentences.size()));
    for (const auto& s : bundle.sentences) {
      put_string(buf, s.id);
      put_u32(buf, static_cast<std::uint32_t>(s.matrix.tokens()));
      for (double v : s.matrix.data()) put_u64(buf, std::bit_cast<std::uint64_t>(v));
    }
    if (!bundle.metadata.empty()) {
      put_u32(buf, static_cast<std::uint32_t>(bundle.metadata.size()));
      for (const auto& [k, v] : bundle.metadata) {
        put_string(buf, k);
        put_string(buf, v);
      }
    }
  } else {
    json header = {{"format", "repgeo-bundle"}, {"version", 1}, {"d", bundle.d}, {"metadata", bundle.metadata}};
    buf += header.dump();
    buf += '\n';
    for (const auto& s : bundle.sentences) {
      const std::size_t d = s.matrix.dim(), L = s.matrix.tokens();
      std::vector<double> row_major(d * L);
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < L; ++i) row_major[j * L + i] = s.matrix(j, i);
      }
      buf += json{{"id", s.id}, {"L", L}, {"values", row_major}}.dump();
      buf += '\n';
    }
  }
  std::ofstream out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

ReprBundle bundle_from_matrices(std::vector<ReprMatrix> matrices, std::map<std::string, std::string> metadata,
                                const std::string& id_prefix) {
  ReprBundle b;
  b.metadata = std::move(metadata);
  if (!matrices.empty()) b.d = matrices.front().dim();
  for (std::size_t s = 0; s < matrices.size(); ++s) {
    b.sentences.push_back({id_prefix + std::to_string(s), std::move(matrices[s])});
  }
  b.validate();
  return b;
}

const Vector* WordVectorTable::find(const std::string& word) const {
  const auto it = index.find(word);
  return it == index.end() ? nullptr : &vectors[it->second];
}

WordVectorTable parse_word_vectors(const std::filesystem::path& path, bool expect_header) {
  std::ifstream in = open_in(path);
  WordVectorTable t;
  std::string line;
  std::size_t line_no = 0;
  std::size_t declared_count = 0;
  const std::string src = path.string();
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = src + ":" + std::to_string(line_no);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (expect_header && line_no == 1) {
      if (toks.size() != 2) fail(Errc::parse_error, where + ": header must be 'count dim'");
      declared_count = static_cast<std::size_t>(parse_double(toks[0], where));
      t.d = static_cast<std::size_t>(parse_double(toks[1], where));
      if (t.d == 0) fail(Errc::parse_error, where + ": header declares d = 0");
      continue;
    }
    if (toks.size() < 2) fail(Errc::parse_error, where + ": entry has no values");
    const std::size_t width = toks.size() - 1;
    if (t.d == 0) t.d = width;
    if (width != t.d) {
      fail(Errc::inconsistent_dimension, where + ": '" + toks[0] + "' has " + std::to_string(width) +
                                             " values, expected " + std::to_string(t.d));
    }
    std::vector<double> v(width);
    for (std::size_t k = 0; k < width; ++k) v[k] = parse_double(toks[k + 1], where);
    if (!t.index.emplace(toks[0], t.words.size()).second) {
      fail(Errc::duplicate_word, where + ": '" + toks[0] + "' already defined");
    }
    t.words.push_back(toks[0]);
    t.vectors.emplace_back(std::move(v));
  }
  if (expect_header && declared_count != t.words.size()) {
    fail(Errc::parse_error, src + ": header declares " + std::to_string(declared_count) + " entries, found " +
                                std::to_string(t.words.size()));
  }
  return t;
}

void write_word_vectors(const WordVectorTable& table, const std::filesystem::path& path, bool with_header) {
  std::string buf;
  if (with_header) buf += std::to_string(table.words.size()) + " " + std::to_string(table.d) + "\n";
  for (std::size_t w = 0; w < table.words.size(); ++w) {
    buf += table.words[w];
    for (double v : table.vectors[w].values()) {
      buf += ' ';
      buf += shortest(v);
    }
    buf += '\n';
  }
  std::ofstream out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

SentenceConversion sentences_to_repr(const WordVectorTable& table, const std::vector<TokenizedSentence>& sentences,
                                     OovPolicy oov) {
  SentenceConversion out;
  out.bundle.d = table.d;
  out.bundle.metadata["source"] = "word-vectors";
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    std::vector<std::vector<double>> columns;
    for (const auto& tok : sentences[s]) {
      const Vector* v = table.find(tok);
      if (v == nullptr) {
        if (oov == OovPolicy::error) {
          fail(Errc::unknown_word, "sentence " + std::to_string(s) + ": '" + tok + "' not in vocabulary");
        }
        ++out.oov_skipped;
        continue;
      }
      columns.push_back(v->values());
    }
    if (columns.size() < 2) {
      fail(Errc::too_short_after_oov, "sentence " + std::to_string(s) + " keeps " + std::to_string(columns.size()) +
                                          " known tokens, need 2");
    }
    out.bundle.sentences.push_back({"s" + std::to_string(s), ReprMatrix::from_columns(columns)});
  }
  return out;
}

std::vector<TokenizedSentence> read_tokenized_sentences(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<TokenizedSentence> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = split_ws(line);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

}  // namespace repgeo
