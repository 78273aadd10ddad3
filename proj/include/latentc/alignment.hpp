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

// Theta-alignment between clusters (encoded concepts) and concept classes.
//
// A cluster c is aligned with class z when the share of c's members that
// belong to z reaches theta. Members are occurrences for contextual schemes
// (instance mode) and unique word types for type-level schemes (type mode).
// Unannotated members count in the denominator only.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentc/annotator.hpp"
#include "latentc/clustering.hpp"
#include "latentc/corpus.hpp"

namespace latentc {

enum class MembershipMode { instance, type };

std::string_view to_string(MembershipMode mode);
MembershipMode membership_mode(SchemeKind kind);

/// `cluster` divides by the cluster side; `class_size` divides the unique-word
/// overlap by J, the class's word count (kept for comparison only).
enum class Denominator { cluster, class_size };

std::string_view to_string(Denominator d);
Denominator parse_denominator(std::string_view name);

struct AlignmentConfig {
  double theta = 0.9;
  Denominator denominator = Denominator::cluster;
};

void validate(const AlignmentConfig& cfg);

/// overlap / total >= theta, evaluated one way everywhere.
bool meets_theta(std::size_t overlap, std::size_t total, double theta);

struct LabelRef {
  std::string scheme;
  std::string label;

  std::string str() const { return scheme + ":" + label; }
  auto operator<=>(const LabelRef&) const = default;
};

struct ClassMatch {
  std::size_t overlap = 0;
  std::size_t denominator = 0;
  double score = 0.0;
  bool aligned = false;
};

/// Scores one cluster against one class. `members` must be non-empty.
ClassMatch align_cluster(std::span<const WordOccurrence> members, const ConceptScheme& scheme,
                         const ConceptClass& cls, const AlignmentConfig& cfg);

struct ClassScore {
  LabelRef label;
  MembershipMode mode = MembershipMode::instance;
  ClassMatch match;
};

struct ClusterAlignment {
  std::uint32_t layer = 0;
  std::uint32_t cluster_id = 0;
  std::size_t size = 0;        // occurrences
  std::size_t word_types = 0;  // unique words
  std::vector<ClassScore> scores;      // classes with non-zero overlap, sorted by label
  std::vector<LabelRef> aligned_labels;
  bool is_aligned = false;

  /// Highest score per scheme (0 when the scheme has no overlapping class).
  double best_score(std::string_view scheme) const;
  bool aligned_in(std::string_view scheme) const;
};

/// Scores clusters against every class of a fixed list of schemes.
class Aligner {
 public:
  Aligner(std::span<const ConceptScheme> schemes, AlignmentConfig cfg);

  const AlignmentConfig& config() const noexcept { return cfg_; }
  std::span<const ConceptScheme> schemes() const noexcept { return schemes_; }

  ClusterAlignment align(std::uint32_t layer, std::uint32_t cluster_id,
                         std::span<const WordOccurrence> members) const;

  /// One alignment per cluster, in cluster id order.
  std::vector<ClusterAlignment> align_model(
      std::uint32_t layer, const std::vector<std::vector<WordOccurrence>>& clusters) const;

 private:
  std::span<const ConceptScheme> schemes_;
  std::vector<MembershipIndex> indexes_;
  AlignmentConfig cfg_;
};

/// Groups occurrence keys by a model's cluster assignment.
std::vector<std::vector<WordOccurrence>> cluster_members(const ClusterModel& model,
                                                         std::span<const RecordKey> keys);

std::vector<ClusterAlignment> align_model(const ClusterModel& model, std::span<const RecordKey> keys,
                                          std::span<const ConceptScheme> schemes,
                                          const AlignmentConfig& cfg);

struct LayerPoint {
  std::uint32_t layer = 0;
  std::size_t clusters = 0;
  std::size_t aligned_count = 0;
  double normalized_count = 0.0;  // aligned_count / max over layers
};

struct SchemeSummary {
  std::string scheme;
  std::vector<LayerPoint> layer_curve;
  std::size_t max_layerwise_match = 0;
  double network_average = 0.0;  // mean over layers of aligned_count / clusters
};

struct LayerAlignment {
  std::uint32_t layer = 0;
  std::size_t clusters = 0;
  std::size_t aligned_clusters = 0;
  double aligned_fraction = 0.0;
};

struct OverallSummary {
  std::vector<LayerAlignment> per_layer;
  double overall = 0.0;  // mean of per-layer aligned fractions
};

struct AlignmentSummary {
  std::vector<SchemeSummary> per_scheme;
  OverallSummary overall;
};

/// Aggregates alignments over `layers`; every listed layer must have at
/// least one cluster. A cluster counts as aligned overall when any class of
/// any scheme aligns.
AlignmentSummary summarize(std::span<const ClusterAlignment> alignments,
                           std::span<const std::string> schemes, std::span<const std::uint32_t> layers);

}  // namespace latentc
