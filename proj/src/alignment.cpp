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

#include "latentc/alignment.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "latentc/errors.hpp"

namespace latentc {

std::string_view to_string(MembershipMode mode) {
  return mode == MembershipMode::instance ? "instance" : "type";
}

MembershipMode membership_mode(SchemeKind kind) {
  return kind == SchemeKind::contextual ? MembershipMode::instance : MembershipMode::type;
}

std::string_view to_string(Denominator d) { return d == Denominator::cluster ? "cluster" : "class_size"; }

Denominator parse_denominator(std::string_view name) {
  if (name == "cluster") return Denominator::cluster;
  if (name == "class_size") return Denominator::class_size;
  throw usage_error("unknown denominator '" + std::string(name) + "' (expected cluster|class_size)");
}

void validate(const AlignmentConfig& cfg) {
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) {
    throw usage_error("theta must lie in (0, 1], got " + std::to_string(cfg.theta));
  }
}

bool meets_theta(std::size_t overlap, std::size_t total, double theta) {
  return total > 0 && static_cast<double>(overlap) / static_cast<double>(total) >= theta;
}

namespace {

ClassMatch make_match(std::size_t overlap, std::size_t denominator, double theta) {
  ClassMatch m;
  m.overlap = overlap;
  m.denominator = denominator;
  m.score = denominator == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(denominator);
  m.aligned = meets_theta(overlap, denominator, theta);
  return m;
}

/// Unique words of a cluster with the index of their first occurrence.
std::vector<std::pair<WordId, std::size_t>> unique_word_reps(std::span<const WordOccurrence> members) {
  std::vector<std::pair<WordId, std::size_t>> out;
  out.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) out.emplace_back(members[i].word_id, i);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }),
            out.end());
  return out;
}

}  // namespace

ClassMatch align_cluster(std::span<const WordOccurrence> members, const ConceptScheme& scheme,
                         const ConceptClass& cls, const AlignmentConfig& cfg) {
  validate(cfg);
  if (members.empty()) throw usage_error("align_cluster: empty cluster");
  if (cfg.denominator == Denominator::class_size) {
    std::set<WordId> hit;
    for (const auto& m : members) {
      if (scheme.contains(cls, m)) hit.insert(m.word_id);
    }
    return make_match(hit.size(), cls.unique_words(), cfg.theta);
  }
  if (membership_mode(scheme.kind) == MembershipMode::instance) {
    const auto n = static_cast<std::size_t>(
        std::count_if(members.begin(), members.end(), [&](const auto& m) { return scheme.contains(cls, m); }));
    return make_match(n, members.size(), cfg.theta);
  }
  const auto words = unique_word_reps(members);
  std::size_t n = 0;
  for (const auto& [w, rep] : words) n += scheme.contains(cls, members[rep]);
  return make_match(n, words.size(), cfg.theta);
}

double ClusterAlignment::best_score(std::string_view scheme) const {
  double best = 0.0;
  for (const auto& s : scores) {
    if (s.label.scheme == scheme) best = std::max(best, s.match.score);
  }
  return best;
}

bool ClusterAlignment::aligned_in(std::string_view scheme) const {
  return std::any_of(aligned_labels.begin(), aligned_labels.end(),
                     [&](const LabelRef& l) { return l.scheme == scheme; });
}

Aligner::Aligner(std::span<const ConceptScheme> schemes, AlignmentConfig cfg)
    : schemes_(schemes), cfg_(cfg) {
  validate(cfg_);
  indexes_.reserve(schemes.size());
  for (const auto& s : schemes) indexes_.emplace_back(s);
}

ClusterAlignment Aligner::align(std::uint32_t layer, std::uint32_t cluster_id,
                                std::span<const WordOccurrence> members) const {
  if (members.empty()) throw invariant_error("cluster " + std::to_string(cluster_id) + " is empty");
  ClusterAlignment out;
  out.layer = layer;
  out.cluster_id = cluster_id;
  out.size = members.size();
  const auto words = unique_word_reps(members);
  out.word_types = words.size();

  for (std::size_t s = 0; s < schemes_.size(); ++s) {
    const auto& scheme = schemes_[s];
    const auto& index = indexes_[s];
    const auto mode = membership_mode(scheme.kind);
    std::map<std::uint32_t, std::size_t> overlap;
    std::size_t denominator = 0;
    if (cfg_.denominator == Denominator::class_size) {
      std::map<std::uint32_t, std::set<WordId>> hit;
      for (const auto& m : members) {
        for (const auto c : index.classes_of(m)) hit[c].insert(m.word_id);
      }
      for (const auto& [c, ws] : hit) overlap[c] = ws.size();
    } else if (mode == MembershipMode::instance) {
      for (const auto& m : members) {
        for (const auto c : index.classes_of(m)) ++overlap[c];
      }
      denominator = members.size();
    } else {
      for (const auto& [w, rep] : words) {
        for (const auto c : index.classes_of(members[rep])) ++overlap[c];
      }
      denominator = words.size();
    }
    for (const auto& [c, n] : overlap) {
      const auto& cls = scheme.classes[c];
      const auto denom = cfg_.denominator == Denominator::class_size ? cls.unique_words() : denominator;
      out.scores.push_back({{scheme.name, cls.label}, mode, make_match(n, denom, cfg_.theta)});
    }
  }
  std::sort(out.scores.begin(), out.scores.end(),
            [](const ClassScore& a, const ClassScore& b) { return a.label < b.label; });
  for (const auto& s : out.scores) {
    if (s.match.aligned) out.aligned_labels.push_back(s.label);
  }
  out.is_aligned = !out.aligned_labels.empty();
  return out;
}

std::vector<ClusterAlignment> Aligner::align_model(
    std::uint32_t layer, const std::vector<std::vector<WordOccurrence>>& clusters) const {
  std::vector<ClusterAlignment> out;
  out.reserve(clusters.size());
  for (std::uint32_t c = 0; c < clusters.size(); ++c) out.push_back(align(layer, c, clusters[c]));
  return out;
}

std::vector<std::vector<WordOccurrence>> cluster_members(const ClusterModel& model,
                                                         std::span<const RecordKey> keys) {
  if (keys.size() != model.assignment.size()) {
    throw invariant_error("cluster model covers " + std::to_string(model.assignment.size()) +
                          " rows but " + std::to_string(keys.size()) + " keys were given");
  }
  std::vector<std::vector<WordOccurrence>> out(model.k);
  for (std::size_t r = 0; r < keys.size(); ++r) out[model.assignment[r]].push_back(keys[r].as_occurrence());
  return out;
}

std::vector<ClusterAlignment> align_model(const ClusterModel& model, std::span<const RecordKey> keys,
                                          std::span<const ConceptScheme> schemes,
                                          const AlignmentConfig& cfg) {
  return Aligner(schemes, cfg).align_model(model.layer, cluster_members(model, keys));
}

AlignmentSummary summarize(std::span<const ClusterAlignment> alignments,
                           std::span<const std::string> schemes, std::span<const std::uint32_t> layers) {
  std::map<std::uint32_t, std::vector<const ClusterAlignment*>> by_layer;
  for (const auto l : layers) by_layer[l];
  for (const auto& a : alignments) {
    auto it = by_layer.find(a.layer);
    if (it != by_layer.end()) it->second.push_back(&a);
  }
  for (const auto& [l, list] : by_layer) {
    if (list.empty()) throw usage_error("summarize: no clusters for layer " + std::to_string(l));
  }

  AlignmentSummary out;
  for (const auto& [l, list] : by_layer) {
    LayerAlignment la;
    la.layer = l;
    la.clusters = list.size();
    la.aligned_clusters = static_cast<std::size_t>(
        std::count_if(list.begin(), list.end(), [](const ClusterAlignment* a) { return a->is_aligned; }));
    la.aligned_fraction = static_cast<double>(la.aligned_clusters) / static_cast<double>(la.clusters);
    out.overall.overall += la.aligned_fraction;
    out.overall.per_layer.push_back(la);
  }
  if (!by_layer.empty()) out.overall.overall /= static_cast<double>(by_layer.size());

  for (const auto& scheme : schemes) {
    SchemeSummary ss;
    ss.scheme = scheme;
    for (const auto& [l, list] : by_layer) {
      LayerPoint p;
      p.layer = l;
      p.clusters = list.size();
      p.aligned_count = static_cast<std::size_t>(std::count_if(
          list.begin(), list.end(), [&](const ClusterAlignment* a) { return a->aligned_in(scheme); }));
      ss.max_layerwise_match = std::max(ss.max_layerwise_match, p.aligned_count);
      ss.network_average += static_cast<double>(p.aligned_count) / static_cast<double>(p.clusters);
      ss.layer_curve.push_back(p);
    }
    for (auto& p : ss.layer_curve) {
      p.normalized_count = ss.max_layerwise_match == 0
                               ? 0.0
                               : static_cast<double>(p.aligned_count) / static_cast<double>(ss.max_layerwise_match);
    }
    if (!by_layer.empty()) ss.network_average /= static_cast<double>(by_layer.size());
    out.per_scheme.push_back(std::move(ss));
  }
  return out;
}

}  // namespace latentc
