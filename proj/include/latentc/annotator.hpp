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

// Human-defined concept schemes.
//
// A contextual scheme labels individual occurrences (POS, SEM, chunking,
// CCG, first/last word). A type-level scheme labels word types (WordNet,
// LIWC, suffix, ngram, casing). Either way each class knows its member
// words, so the number of unique words J is always available.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "latentc/corpus.hpp"

namespace latentc {

enum class SchemeKind { contextual, type_level };

std::string_view to_string(SchemeKind kind);

struct ConceptClass {
  std::string label;
  std::vector<OccurrenceKey> occurrences;  // contextual only; sorted, unique
  std::vector<WordId> words;               // sorted, unique; the class's word types

  std::size_t unique_words() const noexcept { return words.size(); }
};

struct ConceptScheme {
  std::string name;
  SchemeKind kind = SchemeKind::type_level;
  std::vector<ConceptClass> classes;  // sorted by label

  const ConceptClass* find(std::string_view label) const;
  /// Membership test dispatching on kind.
  bool contains(const ConceptClass& cls, const WordOccurrence& occ) const;
  /// Labels carried by an occurrence (contextual) or by its word (type level).
  std::vector<std::string> labels_of(const WordOccurrence& occ) const;
};

/// Accumulates memberships, then emits a scheme with sorted classes and no
/// empty class.
class SchemeBuilder {
 public:
  SchemeBuilder(std::string name, SchemeKind kind) : name_(std::move(name)), kind_(kind) {}

  void add_word(const std::string& label, WordId word);
  void add_occurrence(const std::string& label, const WordOccurrence& occ);
  /// Occurrence membership without touching the word list.
  void add_key(const std::string& label, OccurrenceKey key);
  ConceptScheme finish() &&;

 private:
  struct Pending {
    std::vector<OccurrenceKey> occurrences;
    std::vector<WordId> words;
  };
  std::string name_;
  SchemeKind kind_;
  std::map<std::string, Pending> classes_;
};

/// Class ids per occurrence or per word, for scoring many clusters.
class MembershipIndex {
 public:
  explicit MembershipIndex(const ConceptScheme& scheme);

  const ConceptScheme& scheme() const noexcept { return *scheme_; }
  /// Indices into scheme().classes that `occ` belongs to.
  std::span<const std::uint32_t> classes_of(const WordOccurrence& occ) const;

 private:
  const ConceptScheme* scheme_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> table_;
};

// --- lexical auto-annotators -------------------------------------------------

enum class CasingClass { title, upper, lower, mixed, other };

std::string_view to_string(CasingClass c);
/// ASCII letters decide the class; other bytes count as non-letters.
CasingClass classify_casing(std::string_view word);

ConceptScheme annotate_casing(const OccurrenceSet& occurrences, const Corpus& corpus);

enum class AffixPosition { prefix, suffix };

/// Type-level affix scheme ("suffix" or "prefix"). A word joins class s iff
/// its lowercased form ends (starts) with s and is strictly longer than s.
ConceptScheme annotate_affix(const OccurrenceSet& occurrences, const Corpus& corpus,
                             std::span<const std::string> lexicon, AffixPosition position);
ConceptScheme annotate_suffix(const OccurrenceSet& occurrences, const Corpus& corpus,
                              std::span<const std::string> lexicon);

/// Built-in English suffix list; data/suffixes_en.txt carries the same list.
const std::vector<std::string>& default_suffixes();
std::vector<std::string> load_affix_lexicon(const std::filesystem::path& path);

struct NgramConfig {
  std::size_t min_n = 2;
  std::size_t max_n = 4;
  std::size_t min_members = 2;
};

/// Character n-grams (code points) of lowercased word types; classes with
/// fewer than min_members word types are dropped.
ConceptScheme annotate_ngram(const OccurrenceSet& occurrences, const Corpus& corpus,
                             const NgramConfig& cfg = {});

struct PositionSchemes {
  ConceptScheme first_word;
  ConceptScheme last_word;
};

PositionSchemes annotate_position(const OccurrenceSet& occurrences, const Corpus& corpus);

// --- external annotations ----------------------------------------------------

/// TSV `sentence_id	position	word	label`; each row puts one occurrence
/// into class `label` of a contextual scheme.
ConceptScheme load_token_annotations(const std::filesystem::path& path,
                                     const std::string& scheme_name, const Corpus& corpus);

struct LexiconLoad {
  ConceptScheme scheme;
  std::size_t skipped = 0;  // rows whose word is not in the corpus vocab
};

/// TSV `label	word`; type-level scheme, words may carry several labels.
LexiconLoad load_type_lexicon(const std::filesystem::path& path, const std::string& scheme_name,
                              const Corpus& corpus);

// --- coarse <-> fine ---------------------------------------------------------

struct CoarseMapping {
  std::string scheme;
  std::map<std::string, std::string> fine_to_coarse;

  /// Coarse label for `fine`; unmapped labels pass through.
  const std::string& coarse_of(const std::string& fine) const;
};

/// TSV `fine	coarse`.
CoarseMapping load_coarse_mapping(const std::filesystem::path& path, const std::string& scheme);
CoarseMapping builtin_pos_mapping();
CoarseMapping builtin_sem_mapping();

/// Coarse classes are unions of fine classes. The result is named
/// `<scheme>_coarse` unless `name` is given.
ConceptScheme coarsen(const ConceptScheme& scheme, const CoarseMapping& mapping,
                      std::string name = {});

}  // namespace latentc
