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

#pragma once

// ECX: single-file store of per-occurrence, per-layer f32 vectors.
//
// Little-endian layout:
//   "ECX1" | u16 version=1 | u16 flags=0 | u32 L | u32 D | u32 V | u64 N
//   V x (u16 byte_len, UTF-8 bytes)            vocab, word_id = entry index
//   N x (u32 word_id, u32 sentence_id, u32 position, L*D f32 layer-major)

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "latentc/corpus.hpp"
#include "latentc/errors.hpp"

namespace latentc {

inline constexpr std::uint16_t kEcxVersion = 1;
inline constexpr std::size_t kEcxHeaderBytes = 28;

enum class EcxErrc {
  io,
  bad_magic,
  unsupported_version,
  truncated,
  non_finite,
  malformed,
};

const char* to_string(EcxErrc code);

class EcxError : public Error {
 public:
  EcxError(EcxErrc code, const std::string& msg)
      : Error(ErrorKind::data, std::string("ECX ") + to_string(code) + ": " + msg), code_(code) {}
  EcxErrc code() const noexcept { return code_; }

 private:
  EcxErrc code_;
};

/// Identity of one record; the vectors live in EmbeddingDataset::payload.
struct RecordKey {
  WordId word_id = 0;
  std::uint32_t sentence_id = 0;
  std::uint32_t position = 0;

  OccurrenceKey occurrence() const noexcept { return {sentence_id, position}; }
  WordOccurrence as_occurrence() const noexcept { return {word_id, sentence_id, position}; }
  auto operator<=>(const RecordKey&) const = default;
};

/// All records' vectors stored contiguously: record r, layer l, dim d sits at
/// payload[(r * L + l) * D + d].
struct EmbeddingDataset {
  std::uint32_t num_layers = 0;
  std::uint32_t dim = 0;
  std::vector<std::string> vocab;
  std::vector<RecordKey> records;
  std::vector<float> payload;

  std::size_t size() const noexcept { return records.size(); }
  std::size_t record_floats() const noexcept { return std::size_t{num_layers} * dim; }

  std::span<const float> record_values(std::size_t r) const {
    return {payload.data() + r * record_floats(), record_floats()};
  }
  std::span<float> record_values(std::size_t r) {
    return {payload.data() + r * record_floats(), record_floats()};
  }
  std::span<const float> vector(std::size_t r, std::uint32_t layer) const {
    return record_values(r).subspan(std::size_t{layer} * dim, dim);
  }

  /// Appends one record; `values` must hold L*D floats, layer-major.
  void add_record(RecordKey key, std::span<const float> values);

  bool operator==(const EmbeddingDataset&) const = default;
};

/// Checks every dataset invariant; throws EcxError(malformed|non_finite).
void validate(const EmbeddingDataset& ds);

/// Exact byte count of the serialized dataset.
std::uint64_t serialized_size(const EmbeddingDataset& ds);

void write_dataset(const EmbeddingDataset& ds, std::ostream& out);
void write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path);

EmbeddingDataset read_dataset(std::span<const std::byte> bytes);
EmbeddingDataset read_dataset(const std::filesystem::path& path);

/// Row-major view over a dense f32 matrix.
struct MatrixView {
  std::span<const float> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const float> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

struct LayerSlice {
  std::uint32_t layer = 0;
  std::size_t dim = 0;
  std::vector<float> points;  // N x D, row i belongs to keys[i]
  std::vector<RecordKey> keys;

  std::size_t rows() const noexcept { return keys.size(); }
  MatrixView view() const { return {points, keys.size(), dim}; }
};

/// Copies one layer into a contiguous N x D matrix, rows in record order.
LayerSlice slice_layer(const EmbeddingDataset& ds, std::uint32_t layer);

/// Debug TSV: word, sentence_id, position, then D values.
void write_slice_tsv(std::ostream& out, const LayerSlice& slice, const EmbeddingDataset& ds);

}  // namespace latentc
