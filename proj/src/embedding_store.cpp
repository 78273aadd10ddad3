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

#include "latentc/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

namespace latentc {

const char* to_string(EcxErrc code) {
  switch (code) {
    case EcxErrc::io: return "io error";
    case EcxErrc::bad_magic: return "bad magic";
    case EcxErrc::unsupported_version: return "unsupported version";
    case EcxErrc::truncated: return "truncated file";
    case EcxErrc::non_finite: return "non-finite value";
    case EcxErrc::malformed: return "malformed file";
  }
  return "unknown";
}

void EmbeddingDataset::add_record(RecordKey key, std::span<const float> values) {
  if (values.size() != record_floats()) {
    throw EcxError(EcxErrc::malformed, "record carries " + std::to_string(values.size()) +
                                           " values, expected L*D = " +
                                           std::to_string(record_floats()));
  }
  records.push_back(key);
  payload.insert(payload.end(), values.begin(), values.end());
}

namespace {

constexpr char kMagic[4] = {'E', 'C', 'X', '1'};

std::uint64_t record_bytes(std::uint64_t layers, std::uint64_t dim) { return 12 + 4 * layers * dim; }

class ByteWriter {
 public:
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  std::string& buffer() { return buf_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw EcxError(EcxErrc::truncated, std::string(what) + ": expected " +
                                             std::to_string(pos_ + n) + " bytes, file has " +
                                             std::to_string(bytes_.size()));
    }
  }
  std::uint64_t le(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{std::to_integer<std::uint8_t>(bytes_[pos_ + i])} << (8 * i);
    pos_ += n;
    return v;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

void check_unique(const std::vector<RecordKey>& records) {
  std::vector<RecordKey> sorted(records);
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw EcxError(EcxErrc::malformed,
                   "duplicate record (word_id " + std::to_string(dup->word_id) + ", sentence " +
                       std::to_string(dup->sentence_id) + ", position " +
                       std::to_string(dup->position) + ")");
  }
}

}  // namespace

void validate(const EmbeddingDataset& ds) {
  if (ds.num_layers == 0 || ds.dim == 0) {
    throw EcxError(EcxErrc::malformed, "L and D must both be >= 1");
  }
  if (ds.vocab.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw EcxError(EcxErrc::malformed, "vocab too large");
  }
  for (std::size_t i = 0; i < ds.vocab.size(); ++i) {
    if (ds.vocab[i].size() > std::numeric_limits<std::uint16_t>::max()) {
      throw EcxError(EcxErrc::malformed, "vocab entry " + std::to_string(i) + " longer than 65535 bytes");
    }
    if (!is_valid_utf8(ds.vocab[i])) {
      throw EcxError(EcxErrc::malformed, "vocab entry " + std::to_string(i) + " is not UTF-8");
    }
  }
  if (ds.payload.size() != ds.records.size() * ds.record_floats()) {
    throw EcxError(EcxErrc::malformed, "payload size does not match N*L*D");
  }
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    if (ds.records[r].word_id >= ds.vocab.size()) {
      throw EcxError(EcxErrc::malformed, "record " + std::to_string(r) + " word_id " +
                                             std::to_string(ds.records[r].word_id) +
                                             " outside vocab");
    }
    const auto values = ds.record_values(r);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw EcxError(EcxErrc::non_finite, "record " + std::to_string(r) + " layer " +
                                                std::to_string(i / ds.dim) + " dim " +
                                                std::to_string(i % ds.dim));
      }
    }
  }
  check_unique(ds.records);
}

std::uint64_t serialized_size(const EmbeddingDataset& ds) {
  std::uint64_t n = kEcxHeaderBytes;
  for (const auto& w : ds.vocab) n += 2 + w.size();
  return n + ds.records.size() * record_bytes(ds.num_layers, ds.dim);
}

void write_dataset(const EmbeddingDataset& ds, std::ostream& out) {
  validate(ds);
  ByteWriter w;
  w.buffer().reserve(serialized_size(ds));
  w.raw(kMagic, 4);
  w.u16(kEcxVersion);
  w.u16(0);
  w.u32(ds.num_layers);
  w.u32(ds.dim);
  w.u32(static_cast<std::uint32_t>(ds.vocab.size()));
  w.u64(ds.records.size());
  for (const auto& word : ds.vocab) {
    w.u16(static_cast<std::uint16_t>(word.size()));
    w.raw(word.data(), word.size());
  }
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const auto& key = ds.records[r];
    w.u32(key.word_id);
    w.u32(key.sentence_id);
    w.u32(key.position);
    for (float v : ds.record_values(r)) w.f32(v);
  }
  out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!out) throw EcxError(EcxErrc::io, "write failed");
}

void write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path) {
  validate(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EcxError(EcxErrc::io, "cannot open " + path.string() + " for writing");
  write_dataset(ds, out);
}

EmbeddingDataset read_dataset(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw EcxError(EcxErrc::bad_magic, "file does not start with \"ECX1\"");
  }
  r.need(kEcxHeaderBytes, "header");
  r.str(4);
  const auto version = r.u16();
  if (version != kEcxVersion) {
    throw EcxError(EcxErrc::unsupported_version, "version " + std::to_string(version) +
                                                     ", this reader supports " +
                                                     std::to_string(kEcxVersion));
  }
  const auto flags = r.u16();
  if (flags != 0) throw EcxError(EcxErrc::malformed, "unsupported flags " + std::to_string(flags));

  EmbeddingDataset ds;
  ds.num_layers = r.u32();
  ds.dim = r.u32();
  const auto vocab_size = r.u32();
  const auto n_records = r.u64();
  if (ds.num_layers == 0 || ds.dim == 0) throw EcxError(EcxErrc::malformed, "L and D must both be >= 1");

  ds.vocab.reserve(std::min<std::size_t>(vocab_size, r.remaining() / 2));
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    r.need(2, "vocab section");
    const auto len = r.u16();
    r.need(len, "vocab section");
    ds.vocab.push_back(r.str(len));
    if (!is_valid_utf8(ds.vocab.back())) {
      throw EcxError(EcxErrc::malformed, "vocab entry " + std::to_string(i) + " is not UTF-8");
    }
  }

  const std::uint64_t per_record = record_bytes(ds.num_layers, ds.dim);
  const unsigned __int128 expected =
      static_cast<unsigned __int128>(r.offset()) + static_cast<unsigned __int128>(n_records) * per_record;
  if (expected > bytes.size()) {
    const auto shown = expected > std::numeric_limits<std::uint64_t>::max()
                           ? std::string("more than 2^64")
                           : std::to_string(static_cast<std::uint64_t>(expected));
    throw EcxError(EcxErrc::truncated, "record section: expected " + shown +
                                           " bytes, file has " + std::to_string(bytes.size()));
  }
  if (expected < bytes.size()) {
    throw EcxError(EcxErrc::malformed, std::to_string(bytes.size() - static_cast<std::uint64_t>(expected)) +
                                           " trailing bytes after record section");
  }

  const std::size_t floats = ds.record_floats();
  ds.records.reserve(n_records);
  ds.payload.resize(n_records * floats);
  for (std::uint64_t i = 0; i < n_records; ++i) {
    RecordKey key;
    key.word_id = r.u32();
    key.sentence_id = r.u32();
    key.position = r.u32();
    if (key.word_id >= vocab_size) {
      throw EcxError(EcxErrc::malformed, "record " + std::to_string(i) + " word_id " +
                                             std::to_string(key.word_id) + " outside vocab");
    }
    float* dst = ds.payload.data() + i * floats;
    for (std::size_t k = 0; k < floats; ++k) {
      const float v = r.f32();
      if (!std::isfinite(v)) {
        throw EcxError(EcxErrc::non_finite, "record " + std::to_string(i) + " layer " +
                                                std::to_string(k / ds.dim) + " dim " +
                                                std::to_string(k % ds.dim));
      }
      dst[k] = v;
    }
    ds.records.push_back(key);
  }
  check_unique(ds.records);
  return ds;
}

EmbeddingDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw EcxError(EcxErrc::io, "cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  std::vector<std::byte> bytes(size);
  in.seekg(0);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw EcxError(EcxErrc::io, "read failed for " + path.string());
  }
  return read_dataset(bytes);
}

LayerSlice slice_layer(const EmbeddingDataset& ds, std::uint32_t layer) {
  if (layer >= ds.num_layers) {
    throw usage_error("layer " + std::to_string(layer) + " out of range, dataset has " +
                      std::to_string(ds.num_layers) + " layers");
  }
  LayerSlice slice;
  slice.layer = layer;
  slice.dim = ds.dim;
  slice.keys = ds.records;
  slice.points.resize(ds.size() * ds.dim);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto v = ds.vector(r, layer);
    std::copy(v.begin(), v.end(), slice.points.begin() + static_cast<std::ptrdiff_t>(r * ds.dim));
  }
  return slice;
}

void write_slice_tsv(std::ostream& out, const LayerSlice& slice, const EmbeddingDataset& ds) {
  out << "word\tsentence_id\tposition";
  for (std::size_t d = 0; d < slice.dim; ++d) out << "\tv" << d;
  out << '\n';
  const auto prec = out.precision(9);
  for (std::size_t i = 0; i < slice.rows(); ++i) {
    const auto& k = slice.keys[i];
    out << ds.vocab.at(k.word_id) << '\t' << k.sentence_id << '\t' << k.position;
    for (float v : slice.view().row(i)) out << '\t' << v;
    out << '\n';
  }
  out.precision(prec);
}

}  // namespace latentc
