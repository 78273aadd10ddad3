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

#include <cstdio>
#include <random>

#include "doctest.h"
#include "latentc/composition.hpp"
#include "latentc/rng.hpp"
#include "support/cover_oracle.hpp"

using namespace latentc;
using latentc::testing::random_fixture;

namespace {

std::vector<WordOccurrence> distinct_words(std::uint32_t n) {
  std::vector<WordOccurrence> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back({i, 0, i});
  return out;
}

ConceptScheme contextual(const std::string& name, const std::vector<WordOccurrence>& occ,
                         const std::vector<std::string>& labels) {
  SchemeBuilder b(name, SchemeKind::contextual);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (!labels[i].empty()) b.add_occurrence(labels[i], occ[i]);
  }
  return std::move(b).finish();
}

std::vector<std::string> repeat(std::initializer_list<std::pair<const char*, int>> parts) {
  std::vector<std::string> out;
  for (const auto& [l, n] : parts) out.insert(out.end(), n, l);
  return out;
}

std::vector<std::string> strs(const std::vector<LabelRef>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(l.str());
  return out;
}

}  // namespace

TEST_CASE("composition mode parsing") {
  CHECK(parse_composition_mode("cross").cross);
  const auto w = parse_composition_mode("within:POS");
  CHECK_FALSE(w.cross);
  CHECK(w.scheme == "POS");
  CHECK(w.str() == "within:POS");
  CHECK_THROWS_AS(parse_composition_mode("within:"), Error);
  CHECK_THROWS_AS(parse_composition_mode("both"), Error);
}

TEST_CASE("required cover count matches the theta test") {
  CHECK(required_cover(10, 0.9) == 9);
  CHECK(required_cover(20, 0.9) == 18);
  CHECK(required_cover(30, 0.9) == 27);
  CHECK(required_cover(7, 1.0) == 7);
  CHECK(required_cover(3, 0.5) == 2);
  for (std::size_t units = 1; units < 200; ++units) {
    for (double theta : {0.1, 0.33, 0.5, 0.7, 0.9, 0.95, 1.0}) {
      const auto r = required_cover(units, theta);
      CHECK(meets_theta(r, units, theta));
      if (r > 0) CHECK_FALSE(meets_theta(r - 1, units, theta));
    }
  }
}

TEST_CASE("half JJ, 45% NN, 5% VB needs two classes") {
  const auto members = distinct_words(20);
  const auto s = contextual("POS", members, repeat({{"JJ", 10}, {"NN", 9}, {"VB", 1}}));
  const Composer c(std::span(&s, 1), {0.9, 6, parse_composition_mode("within:POS")});
  const auto e = c.explain(2, 5, members);
  REQUIRE(e.has_value());
  CHECK(e->n() == 2);
  CHECK(strs(e->labels) == std::vector<std::string>{"POS:JJ", "POS:NN"});
  CHECK(e->coverage == doctest::Approx(0.95));
  CHECK(e->layer == 2);
  CHECK(e->cluster_id == 5);
  CHECK(e->mode.str() == "within:POS");

  const Composer one(std::span(&s, 1), {0.9, 1, {}});
  CHECK_FALSE(one.explain(0, 0, members).has_value());
}

TEST_CASE("a 92% JJ cluster is explained by one class") {
  const auto members = distinct_words(25);
  const auto s = contextual("POS", members, repeat({{"JJ", 23}, {"NN", 2}}));
  const auto e = Composer(std::span(&s, 1), {}).explain(0, 0, members);
  REQUIRE(e.has_value());
  CHECK(strs(e->labels) == std::vector<std::string>{"POS:JJ"});
  CHECK(e->coverage == doctest::Approx(0.92));
}

TEST_CASE("countries plus their adjectives compose across schemes") {
  // France Germany Japan Italy Spain Americas | French German Japanese Italian Spanish
  const auto members = distinct_words(11);
  const std::vector<ConceptScheme> schemes{
      contextual("POS", members, repeat({{"NNP", 5}, {"NNPS", 1}, {"JJ", 5}})),
      contextual("SEM", members, repeat({{"GPE", 6}, {"NAT", 3}, {"ATT", 2}})),
  };
  const auto e = Composer(schemes, {}).explain(0, 0, members);
  REQUIRE(e.has_value());
  CHECK(strs(e->labels) == std::vector<std::string>{"POS:JJ", "SEM:GPE"});
  CHECK(e->coverage == 1.0);
  CHECK(e->mode.cross);

  const auto sem = Composer(schemes, {0.9, 6, parse_composition_mode("within:SEM")}).explain(0, 0, members);
  REQUIRE(sem.has_value());
  CHECK(sem->n() == 3);  // GPE + NAT cover 9 of 11, short of 10
  CHECK_THROWS_AS(Composer(schemes, {0.9, 6, parse_composition_mode("within:LIWC")}), Error);
}

TEST_CASE("pruned search equals full enumeration") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 300; ++trial) {
    const auto f = random_fixture(rng, 15);
    const double theta = std::vector<double>{0.5, 0.7, 0.8, 0.9, 0.95, 1.0}[uniform_below(rng, 6)];
    const std::size_t max_n = 1 + uniform_below(rng, 6);
    const auto required = required_cover(f.units, theta);
    const auto got = minimal_cover(f.cands, required, max_n);
    const auto want = latentc::testing::enumerate_cover(f.sets, required, max_n);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->chosen == want->chosen);
      CHECK(got->covered == want->covered);
    }
  }
}

TEST_CASE("returned explanations are minimal") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = random_fixture(rng, 30);
    const auto required = required_cover(f.units, 0.9);
    const auto got = minimal_cover(f.cands, required, 6);
    if (!got) continue;
    const auto n = got->chosen.size();
    if (n > 1) CHECK_FALSE(latentc::testing::enumerate_cover(f.sets, required, n - 1).has_value());
  }
}

TEST_CASE("adding a class never lowers coverage") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_fixture(rng, 10);
    std::vector<std::uint64_t> acc(f.cands[0].bits.size(), 0);
    std::size_t prev = 0;
    for (const auto& c : f.cands) {
      for (std::size_t w = 0; w < acc.size(); ++w) acc[w] |= c.bits[w];
      const auto now = popcount(acc);
      CHECK(now >= prev);
      prev = now;
    }
  }
}

TEST_CASE("max_n of one agrees with single-scheme alignment") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> tags{"JJ", "NN", "VB", ""};
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::uint32_t>(1 + uniform_below(rng, 30));
    auto members = distinct_words(n);
    // some repeated words so type mode differs from instance mode
    for (auto& m : members) m.word_id = static_cast<WordId>(uniform_below(rng, 8));
    std::vector<std::string> labels(n);
    const auto lead = tags[uniform_below(rng, 3)];
    for (auto& l : labels) l = uniform01(rng) < 0.85 ? lead : tags[uniform_below(rng, tags.size())];
    const double theta = 0.5 + 0.5 * uniform01(rng);

    const auto ctx = contextual("POS", members, labels);
    SchemeBuilder tb("LEX", SchemeKind::type_level);
    for (std::size_t i = 0; i < n; ++i) {
      if (!labels[i].empty()) tb.add_word(labels[i], members[i].word_id);
    }
    const auto typ = std::move(tb).finish();
    for (const auto* s : {&ctx, &typ}) {
      const Aligner a(std::span(s, 1), {theta, Denominator::cluster});
      const Composer c(std::span(s, 1), {theta, 1, {}});
      CHECK(a.align(0, 0, members).is_aligned == c.explain(0, 0, members).has_value());
    }
  }
}

TEST_CASE("type-level scope counts word types") {
  std::vector<WordOccurrence> members;
  for (std::uint32_t i = 0; i < 9; ++i) members.push_back({0, i, 0});  // one frequent word
  members.push_back({1, 9, 0});
  SchemeBuilder b("suffix", SchemeKind::type_level);
  b.add_word("y", 0);
  const auto s = std::move(b).finish();
  const Composer c(std::span(&s, 1), {});
  CHECK(c.type_units());
  CHECK_FALSE(c.explain(0, 0, members).has_value());  // 1 of 2 types
}

TEST_CASE("enrichment lists every aligned label") {
  // nouns ending in "y": POS:NN and suffix:y both align
  std::vector<WordOccurrence> members;
  for (std::uint32_t w = 0; w < 10; ++w) members.push_back({w, w, 1});
  const auto pos = contextual("POS", members, repeat({{"NN", 10}}));
  SchemeBuilder sb("suffix", SchemeKind::type_level);
  for (WordId w = 0; w < 10; ++w) sb.add_word("y", w);
  for (WordId w = 0; w < 3; ++w) sb.add_word("ty", w);
  const std::vector<ConceptScheme> schemes{pos, std::move(sb).finish()};
  CHECK(strs(enrich_aligned(members, schemes, 0.9)) == std::vector<std::string>{"POS:NN", "suffix:y"});

  const std::vector<ConceptScheme> only_pos{pos};
  CHECK(strs(enrich_aligned(members, only_pos, 0.9)) == std::vector<std::string>{"POS:NN"});

  // fine inside coarse at theta = 1
  const std::vector<ConceptScheme> nested{pos, coarsen(pos, builtin_pos_mapping())};
  CHECK(strs(enrich_aligned(members, nested, 1.0)) == std::vector<std::string>{"POS:NN", "POS_coarse:Noun"});

  const auto mixed = contextual("POS", members, repeat({{"NN", 5}, {"VB", 5}}));
  CHECK(enrich_aligned(members, std::span(&mixed, 1), 0.9).empty());
}

TEST_CASE("histogram counts minimal N and unexplained clusters") {
  std::vector<ClusterComposition> results(6);
  const std::vector<std::size_t> ns{1, 1, 2, 3, 0, 2};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    results[i].cluster_id = static_cast<std::uint32_t>(i);
    if (ns[i] == 0) continue;
    CompositionExplanation e;
    e.labels.assign(ns[i], LabelRef{"S", "x"});
    results[i].explanation = e;
  }
  const auto h = composition_histogram(results, 6);
  CHECK(h.total == 6);
  CHECK(h.counts == std::vector<std::size_t>{0, 2, 2, 1, 0, 0, 0});
  CHECK(h.unexplained == 1);
  CHECK(h.percent(1) == doctest::Approx(100.0 / 3));
  CHECK(h.cumulative(2) == 4);
  CHECK(h.cumulative(6) == 5);
  CHECK(h.unexplained_percent() == doctest::Approx(100.0 / 6));

  CHECK_THROWS_AS(composition_histogram(results, 2), Error);
}

TEST_CASE("compose_model explains every cluster in id order") {
  const auto members = distinct_words(6);
  const auto s = contextual("POS", members, repeat({{"NN", 3}, {"VB", 3}}));
  const Composer c(std::span(&s, 1), {});
  const std::vector<std::vector<WordOccurrence>> clusters{
      {members[0], members[1], members[2]}, {members[3], members[4], members[5]}, members};
  const auto r = compose_model(c, 4, clusters);
  REQUIRE(r.size() == 3);
  CHECK(r[0].explanation->n() == 1);
  CHECK(r[2].explanation->n() == 2);
  CHECK(r[2].cluster_id == 2);
  CHECK(r[2].layer == 4);
}
