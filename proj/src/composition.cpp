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

#include "latentc/composition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>

#include "latentc/errors.hpp"

namespace latentc {

CompositionMode parse_composition_mode(std::string_view text) {
  if (text == "cross") return {};
  constexpr std::string_view prefix = "within:";
  if (text.starts_with(prefix) && text.size() > prefix.size()) {
    return {false, std::string(text.substr(prefix.size()))};
  }
  throw usage_error("bad composition mode '" + std::string(text) + "' (expected within:<scheme> or cross)");
}

void validate(const CompositionConfig& cfg) {
  validate(AlignmentConfig{cfg.theta, Denominator::cluster});
  if (cfg.max_n < 1) throw usage_error("max_n must be at least 1");
  if (!cfg.mode.cross && cfg.mode.scheme.empty()) throw usage_error("within mode needs a scheme name");
}

std::size_t popcount(std::span<const std::uint64_t> bits) {
  std::size_t n = 0;
  for (const auto w : bits) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t required_cover(std::size_t units, double theta) {
  auto c = static_cast<std::size_t>(std::ceil(theta * static_cast<double>(units)));
  c = std::min(c, units);
  // ceil() can land one off after rounding; settle on the exact threshold.
  while (c > 0 && meets_theta(c - 1, units, theta)) --c;
  while (c <= units && !meets_theta(c, units, theta)) ++c;
  return c;
}

namespace {

bool is_subset(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if ((a[w] & ~b[w]) != 0) return false;
  }
  return true;
}

class CoverSearch {
 public:
  CoverSearch(std::span<const CoverCandidate> cands, std::vector<std::size_t> alive, std::size_t max_n)
      : cands_(cands), alive_(std::move(alive)), width_(cands.front().bits.size()) {
    const std::size_t a = alive_.size();
    // top_[p][r]: sum of the r largest sizes among alive_[p..]
    top_.assign(a + 1, std::vector<std::size_t>(max_n + 1, 0));
    std::vector<std::size_t> best;
    for (std::size_t p = a; p-- > 0;) {
      const auto s = popcount(cands_[alive_[p]].bits);
      best.insert(std::upper_bound(best.begin(), best.end(), s, std::greater<>()), s);
      if (best.size() > max_n) best.pop_back();
      for (std::size_t r = 1; r <= max_n; ++r) {
        top_[p][r] = top_[p][r - 1] + (r <= best.size() ? best[r - 1] : 0);
      }
    }
  }

  /// Best union over size-n subsets that beats `floor` covered units.
  std::optional<CoverResult> run(std::size_t n, std::size_t floor) {
    best_ = floor;
    found_.clear();
    path_.assign(n, 0);
    acc_.assign((n + 1) * width_, 0);
    dfs(0, n, 0);
    if (found_.empty()) return std::nullopt;
    CoverResult r;
    for (const auto p : found_) r.chosen.push_back(alive_[p]);
    r.covered = best_;
    return r;
  }

 private:
  void dfs(std::size_t start, std::size_t remaining, std::size_t covered) {
    const std::size_t depth = path_.size() - remaining;
    const std::uint64_t* cur = &acc_[depth * width_];
    std::uint64_t* next = &acc_[(depth + 1) * width_];
    for (std::size_t p = start; p + remaining <= alive_.size(); ++p) {
      if (covered + top_[p][remaining] <= best_) break;  // bound only shrinks with p
      const auto& bits = cands_[alive_[p]].bits;
      std::size_t c = 0;
      for (std::size_t w = 0; w < width_; ++w) {
        next[w] = cur[w] | bits[w];
        c += static_cast<std::size_t>(std::popcount(next[w]));
      }
      path_[depth] = p;
      if (remaining == 1) {
        if (c > best_) {
          best_ = c;
          found_ = path_;
        }
      } else {
        dfs(p + 1, remaining - 1, c);
      }
    }
  }

  std::span<const CoverCandidate> cands_;
  std::vector<std::size_t> alive_;
  std::size_t width_;
  std::vector<std::vector<std::size_t>> top_;
  std::vector<std::uint64_t> acc_;
  std::vector<std::size_t> path_, found_;
  std::size_t best_ = 0;
};

}  // namespace

std::optional<CoverResult> minimal_cover(std::span<const CoverCandidate> candidates, std::size_t required,
                                         std::size_t max_n) {
  if (candidates.empty() || max_n == 0) return std::nullopt;
  const std::size_t width = candidates.front().bits.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].bits.size() != width) throw invariant_error("cover candidates differ in width");
    if (i > 0 && !(candidates[i - 1].label < candidates[i].label)) {
      throw invariant_error("cover candidates not sorted by label: " + candidates[i].label.str());
    }
  }
  if (required == 0) return CoverResult{};

  // A candidate contained in an earlier one never appears in the answer:
  // swapping it for the earlier label keeps coverage and sorts smaller.
  std::vector<std::size_t> alive;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < a && !dominated; ++b) dominated = is_subset(candidates[a].bits, candidates[b].bits);
    if (!dominated) alive.push_back(a);
  }

  // greedy cover, for an upper bound on N
  std::vector<std::uint64_t> acc(width, 0);
  std::vector<bool> used(alive.size(), false);
  std::size_t covered = 0, greedy_n = 0;
  while (covered < required) {
    std::size_t pick = alive.size(), gain = 0;
    for (std::size_t p = 0; p < alive.size(); ++p) {
      if (used[p]) continue;
      std::size_t g = 0;
      const auto& bits = candidates[alive[p]].bits;
      for (std::size_t w = 0; w < width; ++w) g += static_cast<std::size_t>(std::popcount(bits[w] & ~acc[w]));
      if (g > gain) pick = p, gain = g;
    }
    if (pick == alive.size()) return std::nullopt;  // the union of everything falls short
    used[pick] = true;
    for (std::size_t w = 0; w < width; ++w) acc[w] |= candidates[alive[pick]].bits[w];
    covered += gain;
    ++greedy_n;
  }

  const std::size_t upper = std::min(max_n, greedy_n);
  CoverSearch search(candidates, alive, upper);
  for (std::size_t n = 1; n <= upper; ++n) {
    if (auto r = search.run(n, required - 1)) return r;
  }
  return std::nullopt;
}

Composer::Composer(std::span<const ConceptScheme> schemes, CompositionConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  for (const auto& s : schemes) {
    if (cfg_.mode.cross || s.name == cfg_.mode.scheme) scope_.push_back(&s);
  }
  if (!cfg_.mode.cross && scope_.empty()) {
    throw usage_error("composition scheme '" + cfg_.mode.scheme + "' is not loaded");
  }
  type_units_ = !scope_.empty() && std::all_of(scope_.begin(), scope_.end(), [](const ConceptScheme* s) {
    return s->kind == SchemeKind::type_level;
  });
  indexes_.reserve(scope_.size());
  for (const auto* s : scope_) indexes_.emplace_back(*s);
}

std::vector<CoverCandidate> Composer::candidates(std::span<const WordOccurrence> members,
                                                 std::size_t* units) const {
  std::vector<const WordOccurrence*> reps;
  if (type_units_) {
    std::map<WordId, const WordOccurrence*> first;
    for (const auto& m : members) first.emplace(m.word_id, &m);
    for (const auto& [w, m] : first) reps.push_back(m);
  } else {
    for (const auto& m : members) reps.push_back(&m);
  }
  if (units) *units = reps.size();
  const std::size_t width = (reps.size() + 63) / 64;

  std::map<std::pair<std::size_t, std::uint32_t>, std::vector<std::uint64_t>> hit;
  for (std::size_t u = 0; u < reps.size(); ++u) {
    for (std::size_t s = 0; s < scope_.size(); ++s) {
      for (const auto c : indexes_[s].classes_of(*reps[u])) {
        auto& bits = hit[{s, c}];
        if (bits.empty()) bits.assign(width, 0);
        bits[u / 64] |= std::uint64_t{1} << (u % 64);
      }
    }
  }
  std::vector<CoverCandidate> out;
  out.reserve(hit.size());
  for (auto& [key, bits] : hit) {
    const auto* scheme = scope_[key.first];
    out.push_back({{scheme->name, scheme->classes[key.second].label}, std::move(bits)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  return out;
}

std::optional<CompositionExplanation> Composer::explain(std::uint32_t layer, std::uint32_t cluster_id,
                                                        std::span<const WordOccurrence> members) const {
  if (members.empty()) throw invariant_error("cluster " + std::to_string(cluster_id) + " is empty");
  std::size_t units = 0;
  const auto cands = candidates(members, &units);
  const auto r = minimal_cover(cands, required_cover(units, cfg_.theta), cfg_.max_n);
  if (!r) return std::nullopt;
  CompositionExplanation e;
  e.layer = layer;
  e.cluster_id = cluster_id;
  for (const auto i : r->chosen) e.labels.push_back(cands[i].label);
  e.covered = r->covered;
  e.units = units;
  e.coverage = static_cast<double>(r->covered) / static_cast<double>(units);
  e.mode = cfg_.mode;
  return e;
}

std::vector<ClusterComposition> compose_model(const Composer& composer, std::uint32_t layer,
                                              const std::vector<std::vector<WordOccurrence>>& clusters) {
  std::vector<ClusterComposition> out;
  out.reserve(clusters.size());
  for (std::uint32_t c = 0; c < clusters.size(); ++c) {
    out.push_back({layer, c, clusters[c].size(), composer.explain(layer, c, clusters[c])});
  }
  return out;
}

double CompositionHistogram::percent(std::size_t n) const {
  if (total == 0 || n == 0 || n > max_n) return 0.0;
  return 100.0 * static_cast<double>(counts[n]) / static_cast<double>(total);
}

double CompositionHistogram::unexplained_percent() const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(unexplained) / static_cast<double>(total);
}

std::size_t CompositionHistogram::cumulative(std::size_t n) const {
  std::size_t s = 0;
  for (std::size_t i = 1; i <= std::min(n, max_n); ++i) s += counts[i];
  return s;
}

CompositionHistogram composition_histogram(std::span<const ClusterComposition> results, std::size_t max_n) {
  CompositionHistogram h;
  h.max_n = max_n;
  h.counts.assign(max_n + 1, 0);
  for (const auto& r : results) {
    ++h.total;
    if (!r.explanation) {
      ++h.unexplained;
      continue;
    }
    const auto n = r.explanation->n();
    if (n == 0 || n > max_n) throw invariant_error("explanation size " + std::to_string(n) + " outside 1.." +
                                                   std::to_string(max_n));
    ++h.counts[n];
  }
  return h;
}

std::vector<LabelRef> enrich_aligned(const ClusterAlignment& alignment) {
  return alignment.is_aligned ? alignment.aligned_labels : std::vector<LabelRef>{};
}

std::vector<LabelRef> enrich_aligned(std::span<const WordOccurrence> members,
                                     std::span<const ConceptScheme> schemes, double theta) {
  const Aligner aligner(schemes, AlignmentConfig{theta, Denominator::cluster});
  return enrich_aligned(aligner.align(0, 0, members));
}

}  // namespace latentc
