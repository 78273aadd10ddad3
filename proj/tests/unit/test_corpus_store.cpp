// Copyright 2026 The latentconcepts Authors
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

#include <bit>
#include <cstring>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "latentc/corpus.hpp"
#include "latentc/embedding_store.hpp"

using namespace latentc;

namespace {

// Hand-rolled little-endian encoder, independent of the library writer.
struct Bytes {
  std::vector<std::byte> b;
  void u8(std::uint8_t v) { b.push_back(std::byte{v}); }
  void u16(std::uint16_t v) { u8(v & 0xff), u8(v >> 8); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
  void str(std::string_view s) {
    u16(static_cast<std::uint16_t>(s.size()));
    for (char c : s) u8(static_cast<std::uint8_t>(c));
  }
};

Bytes tiny_file() {
  Bytes x;
  for (char c : std::string_view("ECX1")) x.u8(static_cast<std::uint8_t>(c));
  x.u16(1), x.u16(0), x.u32(2), x.u32(3), x.u32(1), x.u64(1);
  x.str("cat");
  x.u32(0), x.u32(4), x.u32(7);
  for (float f : {1.0f, 2.0f, 3.0f, -1.0f, 0.5f, 0.25f}) x.f32(f);
  return x;
}

EcxErrc read_error(std::span<const std::byte> bytes) {
  try {
    read_dataset(bytes);
  } catch (const EcxError& e) {
    return e.code();
  }
  FAIL("expected an ECX error");
  return EcxErrc::io;
}

Corpus corpus_of(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

}  // namespace

TEST_CASE("corpus parsing assigns dense ids in order of first use") {
  const auto c = corpus_of("the cat sat\n\n  the dog \t ran\r\n");
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.vocab.size() == 5);
  CHECK(c.vocab.word(0) == "the");
  CHECK(c.sentences[1].tokens == std::vector<WordId>{0, 3, 4});
  CHECK(c.sentences[1].id == 1);
  CHECK(c.token_count() == 6);
  CHECK(c.word_at({1, 2}) == 4u);
  CHECK_FALSE(c.word_at({1, 3}).has_value());
  CHECK_FALSE(c.word_at({2, 0}).has_value());
}

TEST_CASE("corpus rejects invalid UTF-8 with the line number") {
  try {
    corpus_of("ok line\nbad \xff byte\n");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(is_valid_utf8("caf\xc3\xa9"));
  CHECK_FALSE(is_valid_utf8("\xc3"));
  CHECK_FALSE(is_valid_utf8("\xed\xa0\x80"));  // surrogate
}

TEST_CASE("frequency filter drops rare words and caps frequent ones") {
  std::string text;
  for (int s = 0; s < 30; ++s) text += "common" + std::string(s < 12 ? " mid" : "") + (s == 0 ? " rare" : "") + "\n";
  const auto c = corpus_of(text);
  const auto occ = filter_occurrences(c, {10, 10, 42});
  std::map<std::string, int> per_word;
  for (const auto& o : occ) ++per_word[c.vocab.word(o.word_id)];
  CHECK(per_word == std::map<std::string, int>{{"common", 10}, {"mid", 10}});
  CHECK(std::is_sorted(occ.begin(), occ.end(), [](auto& a, auto& b) { return a.key() < b.key(); }));
  CHECK(occ == filter_occurrences(c, {10, 10, 42}));

  const auto all = filter_occurrences(c, {1, 100, 0});
  CHECK(all == c.all_occurrences());
  CHECK_THROWS_AS(filter_occurrences(c, {0, 10, 0}), Error);
}

TEST_CASE("one record file has the exact documented size") {
  EmbeddingDataset ds;
  ds.num_layers = 2;
  ds.dim = 3;
  ds.vocab = {"cat"};
  const std::vector<float> v{1, 2, 3, -1, 0.5f, 0.25f};
  ds.add_record({0, 4, 7}, v);
  // header + (2 + 3) vocab bytes + 12 key bytes + 2*3 floats
  CHECK(serialized_size(ds) == 28 + 5 + 12 + 24);

  std::ostringstream out;
  write_dataset(ds, out);
  const auto s = out.str();
  const auto expect = tiny_file().b;
  REQUIRE(s.size() == expect.size());
  CHECK(std::memcmp(s.data(), expect.data(), s.size()) == 0);

  const auto back = read_dataset(expect);
  CHECK(back == ds);
  CHECK(back.vector(0, 1)[2] == 0.25f);
}

TEST_CASE("random datasets round-trip bit-exactly") {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> nd;
  EmbeddingDataset ds;
  ds.num_layers = 3;
  ds.dim = 5;
  ds.vocab = {"a", "b", "\xc3\xa9t\xc3\xa9"};
  std::vector<float> v(15);
  for (std::uint32_t r = 0; r < 50; ++r) {
    for (auto& x : v) x = nd(rng);
    v[0] = -0.0f;
    ds.add_record({r % 3, r, 0}, v);
  }
  std::ostringstream out;
  write_dataset(ds, out);
  const auto s = out.str();
  const auto back = read_dataset(std::as_bytes(std::span(s.data(), s.size())));
  REQUIRE(back.payload.size() == ds.payload.size());
  CHECK(std::memcmp(back.payload.data(), ds.payload.data(), ds.payload.size() * sizeof(float)) == 0);
  CHECK(std::signbit(back.payload[0]));
}

TEST_CASE("corrupt ECX files map to distinct errors") {
  auto good = tiny_file().b;
  CHECK_NOTHROW(read_dataset(good));

  auto magic = good;
  magic[0] = std::byte{'X'};
  CHECK(read_error(magic) == EcxErrc::bad_magic);

  auto version = good;
  version[4] = std::byte{2};
  CHECK(read_error(version) == EcxErrc::unsupported_version);

  auto cut = good;
  cut.pop_back();
  CHECK(read_error(cut) == EcxErrc::truncated);
  CHECK(read_error(std::span(good).first(10)) == EcxErrc::truncated);
  try {
    read_dataset(cut);
  } catch (const EcxError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("expected") != std::string::npos);
  }

  auto nan = good;
  const auto bits = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
  std::memcpy(&nan[nan.size() - 4], &bits, 4);
  CHECK(read_error(nan) == EcxErrc::non_finite);

  auto trailing = good;
  trailing.push_back(std::byte{0});
  CHECK(read_error(trailing) == EcxErrc::malformed);

  auto bad_word = good;
  bad_word[28 + 5] = std::byte{9};  // word_id beyond V
  CHECK(read_error(bad_word) == EcxErrc::malformed);

  CHECK_THROWS_AS(read_dataset(std::filesystem::path("/nonexistent/x.ecx")), EcxError);
}

TEST_CASE("writer refuses invalid datasets") {
  EmbeddingDataset ds;
  ds.num_layers = 1;
  ds.dim = 1;
  ds.vocab = {"a"};
  const float inf = std::numeric_limits<float>::infinity();
  ds.add_record({0, 0, 0}, std::span(&inf, 1));
  std::ostringstream out;
  CHECK_THROWS_AS(write_dataset(ds, out), EcxError);
  CHECK(out.str().empty());
}

TEST_CASE("layer slices keep record order") {
  EmbeddingDataset ds;
  ds.num_layers = 2;
  ds.dim = 2;
  ds.vocab = {"x", "y"};
  ds.add_record({1, 0, 0}, std::vector<float>{1, 2, 3, 4});
  ds.add_record({0, 0, 1}, std::vector<float>{5, 6, 7, 8});
  const auto s = slice_layer(ds, 1);
  CHECK(s.points == std::vector<float>{3, 4, 7, 8});
  CHECK(s.keys == ds.records);
  CHECK_THROWS_AS(slice_layer(ds, 2), Error);
  std::ostringstream out;
  write_slice_tsv(out, s, ds);
  CHECK(out.str().find("y\t0\t0\t3\t4") != std::string::npos);
}
