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

#include "latentc/annotator.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "latentc/errors.hpp"
#include "latentc/tsv.hpp"

namespace latentc {

std::string_view to_string(SchemeKind kind) {
  return kind == SchemeKind::contextual ? "contextual" : "type_level";
}

const ConceptClass* ConceptScheme::find(std::string_view label) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), label,
                             [](const ConceptClass& c, std::string_view l) { return c.label < l; });
  return it != classes.end() && it->label == label ? &*it : nullptr;
}

bool ConceptScheme::contains(const ConceptClass& cls, const WordOccurrence& occ) const {
  if (kind == SchemeKind::contextual) {
    return std::binary_search(cls.occurrences.begin(), cls.occurrences.end(), occ.key());
  }
  return std::binary_search(cls.words.begin(), cls.words.end(), occ.word_id);
}

std::vector<std::string> ConceptScheme::labels_of(const WordOccurrence& occ) const {
  std::vector<std::string> out;
  for (const auto& c : classes) {
    if (contains(c, occ)) out.push_back(c.label);
  }
  return out;
}

void SchemeBuilder::add_word(const std::string& label, WordId word) {
  classes_[label].words.push_back(word);
}

void SchemeBuilder::add_key(const std::string& label, OccurrenceKey key) {
  classes_[label].occurrences.push_back(key);
}

void SchemeBuilder::add_occurrence(const std::string& label, const WordOccurrence& occ) {
  auto& p = classes_[label];
  p.occurrences.push_back(occ.key());
  p.words.push_back(occ.word_id);
}

ConceptScheme SchemeBuilder::finish() && {
  ConceptScheme scheme;
  scheme.name = std::move(name_);
  scheme.kind = kind_;
  for (auto& [label, p] : classes_) {
    std::sort(p.occurrences.begin(), p.occurrences.end());
    p.occurrences.erase(std::unique(p.occurrences.begin(), p.occurrences.end()), p.occurrences.end());
    std::sort(p.words.begin(), p.words.end());
    p.words.erase(std::unique(p.words.begin(), p.words.end()), p.words.end());
    const bool empty = kind_ == SchemeKind::contextual ? p.occurrences.empty() : p.words.empty();
    if (empty) continue;
    ConceptClass cls;
    cls.label = label;
    if (kind_ == SchemeKind::contextual) cls.occurrences = std::move(p.occurrences);
    cls.words = std::move(p.words);
    scheme.classes.push_back(std::move(cls));
  }
  return scheme;
}

MembershipIndex::MembershipIndex(const ConceptScheme& scheme) : scheme_(&scheme) {
  for (std::uint32_t c = 0; c < scheme.classes.size(); ++c) {
    const auto& cls = scheme.classes[c];
    if (scheme.kind == SchemeKind::contextual) {
      for (const auto& k : cls.occurrences) table_[k.packed()].push_back(c);
    } else {
      for (const auto w : cls.words) table_[w].push_back(c);
    }
  }
}

std::span<const std::uint32_t> MembershipIndex::classes_of(const WordOccurrence& occ) const {
  const std::uint64_t key = scheme_->kind == SchemeKind::contextual ? occ.key().packed() : occ.word_id;
  auto it = table_.find(key);
  if (it == table_.end()) return {};
  return it->second;
}

namespace {

bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool ascii_lower(char c) { return c >= 'a' && c <= 'z'; }

std::string ascii_lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (ascii_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

/// Splits UTF-8 into code points (input already validated).
std::vector<std::string_view> code_points(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
    len = std::min(len, s.size() - i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<WordId> unique_words(const OccurrenceSet& occurrences) {
  std::vector<WordId> words;
  words.reserve(occurrences.size());
  for (const auto& o : occurrences) words.push_back(o.word_id);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

}  // namespace

std::string_view to_string(CasingClass c) {
  switch (c) {
    case CasingClass::title: return "title";
    case CasingClass::upper: return "upper";
    case CasingClass::lower: return "lower";
    case CasingClass::mixed: return "mixed";
    case CasingClass::other: return "other";
  }
  return "other";
}

CasingClass classify_casing(std::string_view word) {
  std::size_t upper = 0, lower = 0;
  for (char c : word) {
    upper += ascii_upper(c);
    lower += ascii_lower(c);
  }
  if (upper + lower == 0) return CasingClass::other;
  const bool rest_lower = std::none_of(word.begin() + 1, word.end(), ascii_upper);
  if (ascii_upper(word.front()) && rest_lower) return CasingClass::title;
  if (lower == 0 && code_points(word).size() >= 2) return CasingClass::upper;
  if (upper == 0) return CasingClass::lower;
  return CasingClass::mixed;
}

ConceptScheme annotate_casing(const OccurrenceSet& occurrences, const Corpus& corpus) {
  SchemeBuilder b("casing", SchemeKind::type_level);
  for (const auto w : unique_words(occurrences)) {
    b.add_word(std::string(to_string(classify_casing(corpus.vocab.word(w)))), w);
  }
  return std::move(b).finish();
}

ConceptScheme annotate_affix(const OccurrenceSet& occurrences, const Corpus& corpus,
                             std::span<const std::string> lexicon, AffixPosition position) {
  if (lexicon.empty()) throw usage_error("affix annotator: empty lexicon");
  std::vector<std::string> affixes;
  for (const auto& a : lexicon) {
    if (!a.empty()) affixes.push_back(ascii_lowercase(a));
  }
  std::sort(affixes.begin(), affixes.end());
  affixes.erase(std::unique(affixes.begin(), affixes.end()), affixes.end());

  SchemeBuilder b(position == AffixPosition::suffix ? "suffix" : "prefix", SchemeKind::type_level);
  for (const auto w : unique_words(occurrences)) {
    const auto lowered = ascii_lowercase(corpus.vocab.word(w));
    for (const auto& a : affixes) {
      if (lowered.size() <= a.size()) continue;
      const bool hit = position == AffixPosition::suffix ? lowered.ends_with(a) : lowered.starts_with(a);
      if (hit) b.add_word(a, w);
    }
  }
  return std::move(b).finish();
}

ConceptScheme annotate_suffix(const OccurrenceSet& occurrences, const Corpus& corpus,
                              std::span<const std::string> lexicon) {
  return annotate_affix(occurrences, corpus, lexicon, AffixPosition::suffix);
}

const std::vector<std::string>& default_suffixes() {
  static const std::vector<std::string> list{
      "able", "ac",   "acy",  "age",  "al",   "an",   "ance", "ancy", "ant",  "ar",
      "ary",  "ate",  "ation", "dom", "ed",   "ee",   "en",   "ence", "ency", "ent",
      "er",   "ery",  "es",   "ese",  "est",  "ful",  "hood", "ial",  "ian",  "ible",
      "ic",   "ical", "ies",  "ify",  "ing",  "ion",  "ise",  "ish",  "ism",  "ist",
      "ite",  "ity",  "ive",  "ize",  "less", "ly",   "ment", "ness", "or",   "ory",
      "ous",  "s",    "ship", "sion", "th",   "tion", "ty",   "ure",  "ward", "wise",
      "y"};
  return list;
}

std::vector<std::string> load_affix_lexicon(const std::filesystem::path& path) {
  tsv::Reader r(path);
  std::vector<std::string> out;
  std::string_view line;
  while (r.next(line)) {
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_of(" \t") != std::string_view::npos) r.fail("affix entries must not contain whitespace");
    out.emplace_back(line);
  }
  if (out.empty()) throw usage_error(path.string() + ": empty affix lexicon");
  return out;
}

ConceptScheme annotate_ngram(const OccurrenceSet& occurrences, const Corpus& corpus,
                             const NgramConfig& cfg) {
  if (cfg.min_members < 2) throw usage_error("ngram annotator: min_members must be >= 2");
  if (cfg.min_n < 1 || cfg.max_n < cfg.min_n) throw usage_error("ngram annotator: invalid n range");
  std::map<std::string, std::vector<WordId>> grams;
  for (const auto w : unique_words(occurrences)) {
    const auto lowered = ascii_lowercase(corpus.vocab.word(w));
    const auto cps = code_points(lowered);
    std::set<std::string> seen;
    for (std::size_t n = cfg.min_n; n <= cfg.max_n; ++n) {
      for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        const auto begin = cps[i].data() - lowered.data();
        const auto end = cps[i + n - 1].data() + cps[i + n - 1].size() - lowered.data();
        seen.insert(lowered.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin)));
      }
    }
    for (const auto& g : seen) grams[g].push_back(w);
  }
  SchemeBuilder b("ngram", SchemeKind::type_level);
  for (const auto& [g, words] : grams) {
    if (words.size() < cfg.min_members) continue;
    for (const auto w : words) b.add_word(g, w);
  }
  return std::move(b).finish();
}

PositionSchemes annotate_position(const OccurrenceSet& occurrences, const Corpus& corpus) {
  SchemeBuilder first("first_word", SchemeKind::contextual);
  SchemeBuilder last("last_word", SchemeKind::contextual);
  for (const auto& o : occurrences) {
    if (o.position == 0) first.add_occurrence("first_word", o);
    if (o.position + 1 == corpus.sentence_length(o.sentence_id)) last.add_occurrence("last_word", o);
  }
  return {std::move(first).finish(), std::move(last).finish()};
}

ConceptScheme load_token_annotations(const std::filesystem::path& path,
                                     const std::string& scheme_name, const Corpus& corpus) {
  tsv::Reader r(path);
  r.expect_header("sentence_id\tposition\tword\tlabel");
  SchemeBuilder b(scheme_name, SchemeKind::contextual);
  std::unordered_map<std::uint64_t, std::string> seen;
  std::string_view line;
  while (r.next(line)) {
    if (line.empty()) continue;
    const auto cols = tsv::split(line);
    if (cols.size() != 4) r.fail("expected 4 columns, found " + std::to_string(cols.size()));
    OccurrenceKey key;
    if (!tsv::parse_int(cols[0], key.sentence_id) || !tsv::parse_int(cols[1], key.position)) {
      r.fail("sentence_id and position must be non-negative integers");
    }
    if (cols[3].empty()) r.fail("empty label");
    const auto word = corpus.word_at(key);
    if (!word) r.fail("no corpus token at sentence " + std::string(cols[0]) + " position " + std::string(cols[1]));
    if (corpus.vocab.word(*word) != cols[2]) {
      r.fail("word '" + std::string(cols[2]) + "' does not match corpus token '" + corpus.vocab.word(*word) + "'");
    }
    const std::string label(cols[3]);
    auto [it, inserted] = seen.emplace(key.packed(), label);
    if (!inserted) {
      if (it->second != label) r.fail("conflicting labels '" + it->second + "' and '" + label + "' for one token");
      continue;
    }
    b.add_occurrence(label, {*word, key.sentence_id, key.position});
  }
  return std::move(b).finish();
}

LexiconLoad load_type_lexicon(const std::filesystem::path& path, const std::string& scheme_name,
                              const Corpus& corpus) {
  tsv::Reader r(path);
  r.expect_header("label\tword");
  SchemeBuilder b(scheme_name, SchemeKind::type_level);
  LexiconLoad out;
  std::string_view line;
  while (r.next(line)) {
    if (line.empty()) continue;
    const auto cols = tsv::split(line);
    if (cols.size() != 2) r.fail("expected 2 columns, found " + std::to_string(cols.size()));
    if (cols[0].empty() || cols[1].empty()) r.fail("empty label or word");
    const auto w = corpus.vocab.find(cols[1]);
    if (!w) {
      ++out.skipped;
      continue;
    }
    b.add_word(std::string(cols[0]), *w);
  }
  out.scheme = std::move(b).finish();
  return out;
}

const std::string& CoarseMapping::coarse_of(const std::string& fine) const {
  auto it = fine_to_coarse.find(fine);
  return it == fine_to_coarse.end() ? fine : it->second;
}

CoarseMapping load_coarse_mapping(const std::filesystem::path& path, const std::string& scheme) {
  tsv::Reader r(path);
  r.expect_header("fine\tcoarse");
  CoarseMapping m;
  m.scheme = scheme;
  std::string_view line;
  while (r.next(line)) {
    if (line.empty()) continue;
    const auto cols = tsv::split(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) r.fail("expected 'fine<TAB>coarse'");
    auto [it, inserted] = m.fine_to_coarse.emplace(cols[0], cols[1]);
    if (!inserted && it->second != cols[1]) r.fail("fine label '" + it->first + "' mapped twice");
  }
  return m;
}

namespace {

CoarseMapping from_groups(std::string scheme,
                          std::initializer_list<std::pair<const char*, std::initializer_list<const char*>>> groups) {
  CoarseMapping m;
  m.scheme = std::move(scheme);
  for (const auto& [coarse, fines] : groups) {
    for (const char* f : fines) m.fine_to_coarse.emplace(f, coarse);
  }
  return m;
}

}  // namespace

CoarseMapping builtin_pos_mapping() {
  auto m = from_groups("POS", {
      {"Adjective", {"JJ", "JJR", "JJS"}},
      {"Adverb", {"RB", "RBS", "WRB", "RBR"}},
      {"Conjunction", {"CC"}},
      {"Determiner", {"DT", "WDT"}},
      {"Noun", {"NN", "NNS", "NNP", "NNPS"}},
      {"Number", {"CD"}},
      {"Preposition", {"IN", "TO"}},
      {"Pronoun", {"PRP", "PRP$", "WP", "WP$"}},
      {"Verb", {"VB", "VBN", "VBZ", "VBG", "VBP", "VBD"}},
  });
  for (const char* same : {"$", "-LRB-", "#", "FW", "-RRB-", "LS", "POS", "''", "EX", "SYM", ",",
                           ":", "RP", ".", "PDT", "MD", "UH"}) {
    m.fine_to_coarse.emplace(same, same);
  }
  return m;
}

CoarseMapping builtin_sem_mapping() {
  return from_groups("SEM", {
      {"ACT", {"QUE"}},
      {"ANA", {"DEF", "DST", "EMP", "HAS", "PRO", "REF"}},
      {"ATT", {"INT", "IST", "QUA", "REL", "SCO"}},
      {"COM", {"COM", "LES", "MOR", "TOP"}},
      {"DSC", {"APP", "BUT", "COO", "SUB"}},
      {"DXS", {"PRX"}},
      {"EVE", {"EXG", "EXS", "EXT", "EXV"}},
      {"LOG", {"ALT", "AND", "DIS", "EXC", "EXN", "IMP", "NIL", "RLI"}},
      {"MOD", {"NEC", "NOT", "POS"}},
      {"NAM", {"ART", "GPE", "HAP", "LOC", "NAT", "ORG", "PER", "UOM"}},
      {"TIM", {"DEC", "DOM", "DOW", "MOY", "TIM", "YOC"}},
      {"TNS", {"EFS", "ENG", "ENS", "ENT", "EPG", "EPS", "EPT", "ETG", "ETV", "FUT", "NOW", "PST"}},
      {"UNE", {"CON", "ROL"}},
      {"UNK", {"UNK"}},
  });
}

ConceptScheme coarsen(const ConceptScheme& scheme, const CoarseMapping& mapping, std::string name) {
  if (mapping.scheme != scheme.name) {
    throw usage_error("coarse mapping for '" + mapping.scheme + "' applied to scheme '" + scheme.name + "'");
  }
  SchemeBuilder b(name.empty() ? scheme.name + "_coarse" : std::move(name), scheme.kind);
  for (const auto& cls : scheme.classes) {
    const auto& coarse = mapping.coarse_of(cls.label);
    for (const auto& k : cls.occurrences) b.add_key(coarse, k);
    for (const auto w : cls.words) b.add_word(coarse, w);
  }
  return std::move(b).finish();
}

}  // namespace latentc
