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

// Compositional explanations: the smallest set of concept classes whose
// union covers at least theta of a cluster.
//
// Units are occurrences, or unique word types when every scheme in scope is
// type-level. A unit is covered when it belongs to any chosen class.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentc/alignment.hpp"
#include "latentc/annotator.hpp"

namespace latentc {

struct CompositionMode {
  bool cross = true;
  std::string scheme;  // set when !cross

  std::string str() const { return cross ? "cross" : "within:" + scheme; }
  bool operator==(const CompositionMode&) const = default;
};

/// "cross" or "within:<scheme>".
CompositionMode parse_composition_mode(std::string_view text);

struct CompositionConfig {
  double theta = 0.9;
  std::size_t max_n = 6;
  CompositionMode mode;
};

void validate(const CompositionConfig& cfg);

struct CompositionExplanation {
  std::uint32_t layer = 0;
  std::uint32_t cluster_id = 0;
  std::vector<LabelRef> labels;  // sorted
  std::size_t covered = 0;
  std::size_t units = 0;
  double coverage = 0.0;
  CompositionMode mode;

  std::size_t n() const noexcept { return labels.size(); }
};

// --- set-cover core ------------------------------------------------------------

/// Candidate for the cover search: a label and the units it covers, as a
/// bitset over the cluster's units.
struct CoverCandidate {
  LabelRef label;
  std::vector<std::uint64_t> bits;
};

struct CoverResult {
  std::vector<std::size_t> chosen;  // indices into the candidate list, ascending
  std::size_t covered = 0;
};

std::size_t popcount(std::span<const std::uint64_t> bits);

/// Exact search for the smallest N <= max_n whose union covers at least
/// `required` units; among equal N the largest union, then the
/// lexicographically smallest label list. Candidates must be sorted by
/// label and share one bitset width.
std::optional<CoverResult> minimal_cover(std::span<const CoverCandidate> candidates,
                                         std::size_t required, std::size_t max_n);

/// Smallest covered count that satisfies theta for `units` units.
std::size_t required_cover(std::size_t units, double theta);

// --- per-cluster explanation -----------------------------------------------------

class Composer {
 public:
  Composer(std::span<const ConceptScheme> schemes, CompositionConfig cfg);

  const CompositionConfig& config() const noexcept { return cfg_; }
  /// True when units are word types rather than occurrences.
  bool type_units() const noexcept { return type_units_; }

  /// Labels with non-zero overlap and their unit bitsets, sorted by label.
  std::vector<CoverCandidate> candidates(std::span<const WordOccurrence> members,
                                         std::size_t* units = nullptr) const;

  std::optional<CompositionExplanation> explain(std::uint32_t layer, std::uint32_t cluster_id,
                                                std::span<const WordOccurrence> members) const;

 private:
  std::vector<const ConceptScheme*> scope_;
  std::vector<MembershipIndex> indexes_;
  CompositionConfig cfg_;
  bool type_units_ = false;
};

struct ClusterComposition {
  std::uint32_t layer = 0;
  std::uint32_t cluster_id = 0;
  std::size_t size = 0;
  std::optional<CompositionExplanation> explanation;
};

std::vector<ClusterComposition> compose_model(const Composer& composer, std::uint32_t layer,
                                              const std::vector<std::vector<WordOccurrence>>& clusters);

struct CompositionHistogram {
  std::size_t max_n = 0;
  std::vector<std::size_t> counts;  // counts[N] for N in 1..max_n; counts[0] unused
  std::size_t unexplained = 0;
  std::size_t total = 0;

  double percent(std::size_t n) const;
  double unexplained_percent() const;
  /// Clusters explained with at most N classes.
  std::size_t cumulative(std::size_t n) const;
};

CompositionHistogram composition_histogram(std::span<const ClusterComposition> results, std::size_t max_n);

/// Every label of any scheme that aligns on its own; empty when the cluster
/// is not aligned.
std::vector<LabelRef> enrich_aligned(const ClusterAlignment& alignment);
std::vector<LabelRef> enrich_aligned(std::span<const WordOccurrence> members,
                                     std::span<const ConceptScheme> schemes, double theta);

}  // namespace latentc
