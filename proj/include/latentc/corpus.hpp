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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace latentc {

using WordId = std::uint32_t;

/// Surface form <-> dense word id, ids assigned in first-appearance order.
class Vocab {
 public:
  /// Returns the id of `word`, adding it if unseen.
  WordId intern(std::string_view word);
  std::optional<WordId> find(std::string_view word) const;
  const std::string& word(WordId id) const { return words_.at(id); }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct Sentence {
  std::uint32_t id = 0;
  std::vector<WordId> tokens;
};

/// Position of one token in the corpus.
struct OccurrenceKey {
  std::uint32_t sentence_id = 0;
  std::uint32_t position = 0;

  auto operator<=>(const OccurrenceKey&) const = default;
  std::uint64_t packed() const noexcept {
    return (std::uint64_t{sentence_id} << 32) | position;
  }
};

/// One contextual instance of a word.
struct WordOccurrence {
  WordId word_id = 0;
  std::uint32_t sentence_id = 0;
  std::uint32_t position = 0;

  OccurrenceKey key() const noexcept { return {sentence_id, position}; }
  auto operator<=>(const WordOccurrence&) const = default;
};

using OccurrenceSet = std::vector<WordOccurrence>;

struct Corpus {
  std::vector<Sentence> sentences;
  Vocab vocab;

  std::size_t token_count() const noexcept;
  /// Word id at a slot, or nullopt when the slot does not exist.
  std::optional<WordId> word_at(OccurrenceKey key) const noexcept;
  std::size_t sentence_length(std::uint32_t sentence_id) const {
    return sentences.at(sentence_id).tokens.size();
  }
  /// Every token as an occurrence, in (sentence, position) order.
  OccurrenceSet all_occurrences() const;
};

/// Parses one-sentence-per-line text. Blank lines are skipped; sentence ids
/// stay dense. Invalid UTF-8 raises a data error naming the line.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

struct FilterConfig {
  std::size_t min_frequency = 10;
  std::size_t max_occurrences = 10;
  std::uint64_t seed = 0;
};

/// Drops words seen fewer than min_frequency times and keeps a seeded sample
/// of max_occurrences for the rest. Result is in corpus order.
OccurrenceSet filter_occurrences(const Corpus& corpus, const FilterConfig& cfg);
/// Same rule restricted to `available`: frequencies still come from the
/// whole corpus, sampling draws only from `available`.
OccurrenceSet filter_occurrences(const Corpus& corpus, const OccurrenceSet& available, const FilterConfig& cfg);

/// TSV with header `word_id	word	sentence_id	position`.
void write_occurrences_tsv(std::ostream& out, const OccurrenceSet& occurrences,
                           const Corpus& corpus);

bool is_valid_utf8(std::string_view bytes);

}  // namespace latentc
