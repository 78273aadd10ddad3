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

#include <random>

#include "doctest.h"
#include "latentc/alignment.hpp"
#include "latentc/rng.hpp"

using namespace latentc;

namespace {

// Cluster of n occurrences, each its own word (ids 0..n-1) in sentence 0.
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

}  // namespace

TEST_CASE("nine of ten aligns at theta 0.9, eight of ten does not") {
  const auto members = distinct_words(10);
  const auto s9 = contextual("POS", members, repeat({{"JJ", 9}, {"NN", 1}}));
  const auto m9 = align_cluster(members, s9, *s9.find("JJ"), {});
  CHECK(m9.overlap == 9);
  CHECK(m9.denominator == 10);
  CHECK(m9.aligned);

  const auto s8 = contextual("POS", members, repeat({{"JJ", 8}, {"NN", 2}}));
  CHECK_FALSE(align_cluster(members, s8, *s8.find("JJ"), {}).aligned);

  // 0.9 * 10 must not fall foul of rounding
  CHECK(meets_theta(9, 10, 0.9));
  CHECK(meets_theta(27, 30, 0.9));
  CHECK_FALSE(meets_theta(26, 30, 0.9));
  CHECK(meets_theta(7, 7, 1.0));
  CHECK_FALSE(meets_theta(0, 0, 0.5));
}

TEST_CASE("unannotated members count only in the denominator") {
  const auto members = distinct_words(10);
  const auto s = contextual("POS", members, repeat({{"JJ", 8}, {"", 2}}));
  const Aligner a(std::span(&s, 1), {});
  const auto r = a.align(3, 7, members);
  CHECK(r.layer == 3);
  CHECK(r.cluster_id == 7);
  REQUIRE(r.scores.size() == 1);
  CHECK(r.scores[0].match.score == doctest::Approx(0.8));
  CHECK_FALSE(r.is_aligned);
  CHECK(r.best_score("POS") == doctest::Approx(0.8));
  CHECK(r.best_score("SEM") == 0.0);
}

TEST_CASE("type-level schemes count unique words") {
  // 10 occurrences of "cities" and one each of "dog", "cat": 1 of 3 types
  std::vector<WordOccurrence> members;
  for (std::uint32_t i = 0; i < 10; ++i) members.push_back({0, i, 0});
  members.push_back({1, 20, 0});
  members.push_back({2, 21, 0});
  SchemeBuilder b("suffix", SchemeKind::type_level);
  b.add_word("ies", 0);
  b.add_word("s", 0);
  b.add_word("og", 1);
  const auto s = std::move(b).finish();

  const auto m = align_cluster(members, s, *s.find("ies"), {});
  CHECK(m.overlap == 1);
  CHECK(m.denominator == 3);

  const Aligner a(std::span(&s, 1), {0.3, Denominator::cluster});
  const auto r = a.align(0, 0, members);
  CHECK(r.word_types == 3);
  CHECK(r.scores[0].mode == MembershipMode::type);
  CHECK(r.aligned_labels == std::vector<LabelRef>{{"suffix", "ies"}, {"suffix", "og"}, {"suffix", "s"}});
}

TEST_CASE("class-size denominator divides by the class word count") {
  const auto members = distinct_words(4);
  SchemeBuilder b("LIWC", SchemeKind::type_level);
  for (WordId w = 0; w < 20; ++w) b.add_word("affect", w);
  const auto s = std::move(b).finish();
  const auto m = align_cluster(members, s, s.classes[0], {0.9, Denominator::class_size});
  CHECK(m.overlap == 4);
  CHECK(m.denominator == 20);
  CHECK_FALSE(m.aligned);
  CHECK(align_cluster(members, s, s.classes[0], {}).aligned);
  CHECK(parse_denominator("class_size") == Denominator::class_size);
  CHECK_THROWS_AS(parse_denominator("J"), Error);
}

TEST_CASE("theta outside (0, 1] is a usage error") {
  const auto members = distinct_words(1);
  const auto s = contextual("POS", members, {"NN"});
  for (double t : {0.0, -0.1, 1.5}) {
    CHECK_THROWS_AS(Aligner(std::span(&s, 1), {t, Denominator::cluster}), Error);
  }
}

TEST_CASE("alignment is monotone in theta and under coarsening") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> fine{"JJ", "JJR", "NN", "NNS", "VB", "VBD"};
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::uint32_t>(5 + uniform_below(rng, 40));
    const auto members = distinct_words(n);
    std::vector<std::string> labels(n);
    const auto bias = uniform_below(rng, fine.size());
    for (auto& l : labels) l = uniform01(rng) < 0.7 ? fine[bias] : fine[uniform_below(rng, fine.size())];
    const auto s = contextual("POS", members, labels);
    const auto c = coarsen(s, builtin_pos_mapping());

    std::vector<ConceptScheme> both{s, c};
    for (double theta : {0.3, 0.5, 0.7, 0.9, 1.0}) {
      // a fine alignment implies the coarse one
      const auto r = Aligner(both, {theta, Denominator::cluster}).align(0, 0, members);
      if (r.aligned_in("POS")) CHECK(r.aligned_in("POS_coarse"));
      CHECK(r.best_score("POS_coarse") >= r.best_score("POS"));
    }
    // aligned label sets shrink as theta grows
    std::vector<LabelRef> prev;
    for (double theta : {1.0, 0.9, 0.7, 0.5, 0.3}) {
      const auto r = Aligner(both, {theta, Denominator::cluster}).align(0, 0, members);
      CHECK(std::includes(r.aligned_labels.begin(), r.aligned_labels.end(), prev.begin(), prev.end()));
      prev = r.aligned_labels;
    }
  }
}

TEST_CASE("summaries per scheme and overall") {
  const auto m4 = distinct_words(4);
  const auto pos = contextual("POS", m4, {"NN", "NN", "NN", "NN"});
  const std::vector<ConceptScheme> schemes{pos};
  const Aligner a(schemes, {});

  std::vector<ClusterAlignment> all;
  // layer 0: both clusters aligned; layer 1: one of two
  all.push_back(a.align(0, 0, m4));
  all.push_back(a.align(0, 1, std::span(m4).first(2)));
  all.push_back(a.align(1, 0, m4));
  const std::vector<WordOccurrence> stray{{9, 5, 0}};
  all.push_back(a.align(1, 1, stray));
  const std::vector<std::string> names{"POS", "SEM"};
  const std::vector<std::uint32_t> layers{0, 1};
  const auto sum = summarize(all, names, layers);

  REQUIRE(sum.per_scheme.size() == 2);
  const auto& p = sum.per_scheme[0];
  CHECK(p.max_layerwise_match == 2);
  CHECK(p.layer_curve[0].aligned_count == 2);
  CHECK(p.layer_curve[1].aligned_count == 1);
  CHECK(p.layer_curve[1].normalized_count == doctest::Approx(0.5));
  CHECK(p.network_average == doctest::Approx(0.75));
  const auto& sem = sum.per_scheme[1];
  CHECK(sem.max_layerwise_match == 0);
  CHECK(sem.layer_curve[0].normalized_count == 0.0);
  CHECK(sum.overall.per_layer[1].aligned_fraction == doctest::Approx(0.5));
  CHECK(sum.overall.overall == doctest::Approx(0.75));

  const std::vector<std::uint32_t> missing{0, 5};
  CHECK_THROWS_AS(summarize(all, names, missing), Error);
}

TEST_CASE("cluster members follow the model assignment") {
  ClusterModel m;
  m.k = 2;
  m.assignment = {1, 0, 1};
  const std::vector<RecordKey> keys{{5, 0, 0}, {6, 0, 1}, {7, 1, 0}};
  const auto groups = cluster_members(m, keys);
  CHECK(groups[0] == std::vector<WordOccurrence>{{6, 0, 1}});
  CHECK(groups[1] == std::vector<WordOccurrence>{{5, 0, 0}, {7, 1, 0}});
  const std::vector<RecordKey> short_keys{{5, 0, 0}};
  CHECK_THROWS_AS(cluster_members(m, short_keys), Error);
}
