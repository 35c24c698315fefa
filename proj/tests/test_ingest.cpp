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

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "repgeo/error.hpp"
#include "repgeo/ingest.hpp"
#include "repgeo/property.hpp"
#include "repgeo/rng.hpp"
#include "support.hpp"

using namespace repgeo;

namespace {

struct Caught {
  Errc code = static_cast<Errc>(-1);
  std::string message;
};

Caught catch_error(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.code(), e.what()};
  }
  return {};
}

void write_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

ReprBundle random_bundle(std::uint64_t seed) {
  rng::Stream gen(seed, 0);
  const std::size_t d = 2 + gen.below(8);
  const std::size_t n = gen.below(6);
  std::vector<ReprMatrix> mats;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t L = 2 + gen.below(6);
    std::vector<double> v(d * L);
    for (double& x : v) x = gen.normal() * std::pow(10.0, gen.uniform(-30.0, 30.0));
    mats.emplace_back(d, L, std::move(v));
  }
  ReprBundle b = bundle_from_matrices(std::move(mats), {{"model", "toy"}, {"layer", std::to_string(seed % 7)}});
  b.d = d;
  return b;
}

bool bitwise_equal(const ReprBundle& a, const ReprBundle& b) {
  if (a.d != b.d || a.metadata != b.metadata || a.sentences.size() != b.sentences.size()) return false;
  for (std::size_t s = 0; s < a.sentences.size(); ++s) {
    const auto& x = a.sentences[s];
    const auto& y = b.sentences[s];
    if (x.id != y.id || x.matrix.dim() != y.matrix.dim() || x.matrix.tokens() != y.matrix.tokens()) return false;
    for (std::size_t k = 0; k < x.matrix.data().size(); ++k) {
      if (std::bit_cast<std::uint64_t>(x.matrix.data()[k]) != std::bit_cast<std::uint64_t>(y.matrix.data()[k])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("bundle round trip, both encodings") {
  const std::string text = test::temp_path("rt.jsonl"), bin = test::temp_path("rt.bin");
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const ReprBundle b = random_bundle(seed);
    write_bundle(b, text);
    write_bundle(b, bin);
    CHECK(bitwise_equal(read_bundle(text), b));
    CHECK(bitwise_equal(read_bundle(bin), b));
  }
}

TEST_CASE("round trip keeps awkward doubles bit-exact") {
  const std::vector<double> v{-0.0,
                              0.1,
                              1.0 / 3.0,
                              std::numeric_limits<double>::denorm_min(),
                              std::numeric_limits<double>::max(),
                              -std::numeric_limits<double>::min(),
                              123456789.123456789};
  ReprBundle b;
  b.d = 7;
  std::vector<double> both = v;
  both.insert(both.end(), v.rbegin(), v.rend());
  b.sentences.push_back({"x", ReprMatrix(7, 2, both)});
  for (const char* name : {"awk.jsonl", "awk.bin"}) {
    const std::string p = test::temp_path(name);
    write_bundle(b, p);
    CHECK(bitwise_equal(read_bundle(p), b));
  }
}

TEST_CASE("two-sentence bundle round trip") {
  ReprBundle b = bundle_from_matrices({test::gaussian_matrix(3, 2, 1), test::gaussian_matrix(3, 5, 2)});
  CHECK(b.d == 3);
  CHECK(b.sentences[1].id == "s1");
  const std::string p = test::temp_path("two.jsonl");
  write_bundle(b, p);
  CHECK(read_bundle(p) == b);
}

TEST_CASE("text encoding is row-major per sentence") {
  ReprBundle b;
  b.d = 2;
  b.sentences.push_back({"a", ReprMatrix::from_columns({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}})});
  const std::string p = test::temp_path("rowmajor.jsonl");
  write_bundle(b, p, BundleEncoding::text);
  std::ifstream in(p);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(line.find("[1.0,3.0,5.0,2.0,4.0,6.0]") != std::string::npos);
}

TEST_CASE("binary layout") {
  ReprBundle b;
  b.d = 2;
  b.sentences.push_back({"ab", ReprMatrix(2, 2, {1.0, 0.0, 0.0, 0.0})});
  const std::string p = test::temp_path("layout.bin");
  write_bundle(b, p);
  std::ifstream in(p, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string expected = std::string("RGB1") + std::string("\x02\x00\x00\x00", 4) + std::string("\x01\x00\x00\x00", 4) +
                               std::string("\x02\x00\x00\x00", 4) + "ab" + std::string("\x02\x00\x00\x00", 4) +
                               std::string("\x00\x00\x00\x00\x00\x00\xf0\x3f", 8);
  CHECK(bytes.substr(0, expected.size()) == expected);
}

TEST_CASE("mismatched d names the sentence") {
  ReprBundle b;
  b.d = 3;
  b.sentences.push_back({"good", test::gaussian_matrix(3, 2, 1)});
  b.sentences.push_back({"bad-one", test::gaussian_matrix(4, 2, 1)});
  const auto c = catch_error([&] { b.validate(); });
  CHECK(c.code == Errc::dimension_mismatch);
  CHECK(c.message.find("bad-one") != std::string::npos);
  CHECK(catch_error([&] { write_bundle(b, test::temp_path("bad.bin")); }).code == Errc::dimension_mismatch);

  const std::string p = test::temp_path("bad.jsonl");
  write_text(p,
             "{\"format\":\"repgeo-bundle\",\"version\":1,\"d\":2}\n"
             "{\"id\":\"ok\",\"L\":2,\"values\":[1,2,3,4]}\n"
             "{\"id\":\"short\",\"L\":2,\"values\":[1,2,3]}\n");
  const auto t = catch_error([&] { read_bundle(p); });
  CHECK(t.code == Errc::dimension_mismatch);
  CHECK(t.message.find("short") != std::string::npos);
}

TEST_CASE("duplicate ids are rejected") {
  ReprBundle b;
  b.d = 2;
  b.sentences.push_back({"x", test::gaussian_matrix(2, 2, 1)});
  b.sentences.push_back({"x", test::gaussian_matrix(2, 2, 2)});
  CHECK(catch_error([&] { b.validate(); }).code == Errc::invalid_argument);
}

TEST_CASE("empty bundle") {
  ReprBundle b;
  b.d = 5;
  for (const char* name : {"empty.jsonl", "empty.bin"}) {
    const std::string p = test::temp_path(name);
    write_bundle(b, p);
    const ReprBundle back = read_bundle(p);
    CHECK(back == b);
    const auto mats = back.matrices();
    CHECK(catch_error([&] { batch_property(mats, kDefaultConvention, false); }).code == Errc::empty_corpus);
  }
}

TEST_CASE("parse errors carry a location") {
  const std::string p = test::temp_path("garbled.jsonl");
  write_text(p, "{\"format\":\"repgeo-bundle\",\"version\":1,\"d\":2}\n{\"id\":\"a\",\"L\":2,\"values\":[1,2,3,4]}\n{oops\n");
  const auto c = catch_error([&] { read_bundle(p); });
  CHECK(c.code == Errc::parse_error);
  CHECK(c.message.find(":3:") != std::string::npos);

  const std::string q = test::temp_path("trunc.bin");
  write_text(q, std::string("RGB1\x02\x00\x00\x00\x01\x00\x00\x00", 12));
  const auto t = catch_error([&] { read_bundle(q); });
  CHECK(t.code == Errc::parse_error);
  CHECK(t.message.find("offset") != std::string::npos);

  CHECK(catch_error([] { read_bundle("/nonexistent/dir/x.bin"); }).code == Errc::io_error);
  CHECK(catch_error([] { write_bundle(ReprBundle{}, "/nonexistent/dir/x.bin"); }).code == Errc::io_error);
}

TEST_CASE("word vectors: plain format") {
  const std::string p = test::temp_path("wv.txt");
  write_text(p, "the 0.1 0.2 0.3\ncat -1 0 2.5\n");
  const auto t = parse_word_vectors(p, false);
  CHECK(t.d == 3);
  REQUIRE(t.words.size() == 2);
  const Vector* v = t.find("the");
  REQUIRE(v != nullptr);
  CHECK((*v)[0] == 0.1);
  CHECK((*v)[1] == 0.2);
  CHECK((*v)[2] == 0.3);
  CHECK(t.find("dog") == nullptr);
}

TEST_CASE("word vectors: header format") {
  const std::string p = test::temp_path("wvh.txt");
  write_text(p, "2 3\na 1 2 3\nb 4 5 6\n");
  const auto t = parse_word_vectors(p, true);
  CHECK(t.d == 3);
  CHECK(t.words.size() == 2);
  write_text(p, "3 3\na 1 2 3\nb 4 5 6\n");
  CHECK(catch_error([&] { parse_word_vectors(p, true); }).code == Errc::parse_error);
}

TEST_CASE("word vectors: validation") {
  const std::string p = test::temp_path("wvbad.txt");
  write_text(p, "a 1 2 3\nb 1 2\n");
  const auto c = catch_error([&] { parse_word_vectors(p, false); });
  CHECK(c.code == Errc::inconsistent_dimension);
  CHECK(c.message.find(":2:") != std::string::npos);
  write_text(p, "a 1 2\na 3 4\n");
  CHECK(catch_error([&] { parse_word_vectors(p, false); }).code == Errc::duplicate_word);
  write_text(p, "a 1 x\n");
  CHECK(catch_error([&] { parse_word_vectors(p, false); }).code == Errc::parse_error);
}

TEST_CASE("word vectors: reserialization preserves order and values") {
  const std::string p = test::temp_path("wvrt.txt"), q = test::temp_path("wvrt2.txt");
  write_text(p, "zeta 0.1 1e-300 -7\nalpha 3.141592653589793 0 2\nmid 1 1 1\n");
  const auto t = parse_word_vectors(p, false);
  write_word_vectors(t, q, true);
  const auto back = parse_word_vectors(q, true);
  CHECK(back.words == t.words);
  for (std::size_t w = 0; w < t.words.size(); ++w) CHECK(back.vectors[w].values() == t.vectors[w].values());
  std::ifstream in(q);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "3 3");
  CHECK(first == "zeta 0.1 1e-300 -7");
}

TEST_CASE("sentences_to_repr") {
  const std::string p = test::temp_path("wvs.txt");
  write_text(p, "a 1 2 -3\nb 0 1 0\nc 2 2 1\n");
  const auto t = parse_word_vectors(p, false);

  const auto same = sentences_to_repr(t, {{"a", "a", "a", "a", "a"}}, OovPolicy::skip);
  REQUIRE(same.bundle.sentences.size() == 1);
  CHECK(same.bundle.d == 3);
  CHECK(same.bundle.sentences[0].matrix.tokens() == 5);
  CHECK(property_cosine(same.bundle.sentences[0].matrix, kDefaultConvention).abs_cos == doctest::Approx(1.0).epsilon(1e-12));

  const auto oov = sentences_to_repr(t, {{"a", "zzz", "b", "c"}}, OovPolicy::skip);
  CHECK(oov.oov_skipped == 1);
  const auto& m = oov.bundle.sentences[0].matrix;
  CHECK(m.tokens() == 3);
  CHECK(m(2, 0) == -3.0);
  CHECK(m(1, 1) == 1.0);
  CHECK(m(0, 2) == 2.0);

  CHECK(catch_error([&] { sentences_to_repr(t, {{"a", "zzz"}}, OovPolicy::error); }).code == Errc::unknown_word);
  CHECK(catch_error([&] { sentences_to_repr(t, {{"a", "zzz"}}, OovPolicy::skip); }).code ==
        Errc::too_short_after_oov);
}

TEST_CASE("tokenized sentence reader skips blank lines") {
  const std::string p = test::temp_path("sent.txt");
  write_text(p, "the cat  sat\n\n  \ndog\tran\n");
  const auto s = read_tokenized_sentences(p);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == TokenizedSentence{"the", "cat", "sat"});
  CHECK(s[1] == TokenizedSentence{"dog", "ran"});
}
