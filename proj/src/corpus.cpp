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

#include "latentc/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "latentc/errors.hpp"
#include "latentc/rng.hpp"

namespace latentc {

WordId Vocab::intern(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

std::optional<WordId> Vocab::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

std::optional<WordId> Corpus::word_at(OccurrenceKey key) const noexcept {
  if (key.sentence_id >= sentences.size()) return std::nullopt;
  const auto& tokens = sentences[key.sentence_id].tokens;
  if (key.position >= tokens.size()) return std::nullopt;
  return tokens[key.position];
}

OccurrenceSet Corpus::all_occurrences() const {
  OccurrenceSet out;
  out.reserve(token_count());
  for (const auto& s : sentences) {
    for (std::uint32_t p = 0; p < s.tokens.size(); ++p) out.push_back({s.tokens[p], s.id, p});
  }
  return out;
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += len;
  }
  return true;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\v' || c == '\f' || c == '\r'; }

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_valid_utf8(line)) {
      throw data_error("corpus line " + std::to_string(line_no) + ": invalid UTF-8");
    }
    Sentence sentence;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      if (j > i) sentence.tokens.push_back(corpus.vocab.intern(std::string_view(line).substr(i, j - i)));
      i = j;
    }
    if (sentence.tokens.empty()) continue;
    sentence.id = static_cast<std::uint32_t>(corpus.sentences.size());
    corpus.sentences.push_back(std::move(sentence));
  }
  if (in.bad()) throw data_error("corpus: read failure");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

OccurrenceSet filter_occurrences(const Corpus& corpus, const FilterConfig& cfg) {
  return filter_occurrences(corpus, corpus.all_occurrences(), cfg);
}

OccurrenceSet filter_occurrences(const Corpus& corpus, const OccurrenceSet& available, const FilterConfig& cfg) {
  if (cfg.min_frequency < 1 || cfg.max_occurrences < 1) {
    throw usage_error("filter: min_frequency and max_occurrences must be >= 1");
  }
  std::vector<std::size_t> frequency(corpus.vocab.size(), 0);
  for (const auto& s : corpus.sentences) {
    for (const auto w : s.tokens) ++frequency[w];
  }
  std::vector<OccurrenceSet> by_word(corpus.vocab.size());
  for (const auto& occ : available) {
    if (occ.word_id >= by_word.size()) throw usage_error("filter: word id outside the corpus vocab");
    by_word[occ.word_id].push_back(occ);
  }

  OccurrenceSet out;
  for (WordId w = 0; w < by_word.size(); ++w) {
    auto& list = by_word[w];
    if (frequency[w] < cfg.min_frequency) continue;
    if (list.size() > cfg.max_occurrences) {
      // Partial Fisher-Yates; each word draws from its own seeded stream so
      // the choice for one word does not depend on the rest of the vocab.
      std::sort(list.begin(), list.end());
      std::mt19937_64 rng(derive_seed(cfg.seed, w));
      for (std::size_t i = 0; i < cfg.max_occurrences; ++i) {
        const auto j = i + uniform_below(rng, list.size() - i);
        std::swap(list[i], list[j]);
      }
      list.resize(cfg.max_occurrences);
    }
    out.insert(out.end(), list.begin(), list.end());
  }
  // corpus order
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  return out;
}

void write_occurrences_tsv(std::ostream& out, const OccurrenceSet& occurrences,
                           const Corpus& corpus) {
  out << "word_id\tword\tsentence_id\tposition\n";
  for (const auto& o : occurrences) {
    out << o.word_id << '\t' << corpus.vocab.word(o.word_id) << '\t' << o.sentence_id << '\t'
        << o.position << '\n';
  }
}

}  // namespace latentc
