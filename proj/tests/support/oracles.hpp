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

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "latentc/clustering.hpp"
#include "latentc/rng.hpp"

namespace latentc::testing {

struct Points {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  MatrixView view() const { return {data, rows, cols}; }
};

inline Points random_points(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  Points p{rows, cols, std::vector<float>(rows * cols)};
  for (auto& v : p.data) v = static_cast<float>(scale * standard_normal(rng));
  return p;
}

/// Planted isotropic Gaussian blobs; centres are placed on scaled axes so
/// pairwise separation is known exactly.
inline Points gaussian_blobs(std::mt19937_64& rng, std::size_t blobs, std::size_t per_blob,
                             std::size_t dim, double sigma, double separation,
                             std::vector<std::uint32_t>& labels) {
  Points p{blobs * per_blob, dim, {}};
  p.data.reserve(p.rows * dim);
  labels.clear();
  for (std::size_t b = 0; b < blobs; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        // centre b sits at separation/sqrt(2) on axis b: pairwise distance = separation
        const double centre = (d == b % dim) ? separation / std::sqrt(2.0) : 0.0;
        p.data.push_back(static_cast<float>(centre + sigma * standard_normal(rng)));
      }
      labels.push_back(static_cast<std::uint32_t>(b));
    }
  }
  return p;
}

/// Within-cluster sum of squares computed directly from member points.
inline double ess(const Points& p, const std::vector<std::size_t>& members) {
  std::vector<double> c(p.cols, 0.0);
  for (auto m : members)
    for (std::size_t d = 0; d < p.cols; ++d) c[d] += p.data[m * p.cols + d];
  for (auto& v : c) v /= static_cast<double>(members.size());
  double s = 0;
  for (auto m : members)
    for (std::size_t d = 0; d < p.cols; ++d) {
      const double diff = p.data[m * p.cols + d] - c[d];
      s += diff * diff;
    }
  return s;
}

struct OracleMerge {
  std::set<std::size_t> leaves;  // union formed by the merge
  double height;                 // 2 * increase in total ESS
};

/// Ward by definition: at every step merge the pair whose union increases
/// the total within-cluster sum of squares least. Recomputes everything
/// from raw points each step (O(N^4 D)), so keep N small.
inline std::vector<OracleMerge> brute_force_ward(const Points& p) {
  std::vector<std::vector<std::size_t>> clusters(p.rows);
  for (std::size_t i = 0; i < p.rows; ++i) clusters[i] = {i};
  std::vector<OracleMerge> out;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        auto u = clusters[i];
        u.insert(u.end(), clusters[j].begin(), clusters[j].end());
        const double inc = ess(p, u) - ess(p, clusters[i]) - ess(p, clusters[j]);
        if (inc < best) {
          best = inc;
          bi = i;
          bj = j;
        }
      }
    auto u = clusters[bi];
    u.insert(u.end(), clusters[bj].begin(), clusters[bj].end());
    out.push_back({std::set<std::size_t>(u.begin(), u.end()), 2.0 * best});
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = u;
  }
  return out;
}

/// Leaf set created by every merge, keyed by the set, valued by height.
inline std::map<std::vector<std::uint32_t>, double> merge_sets(const Dendrogram& d) {
  std::vector<std::vector<std::uint32_t>> nodes(d.num_leaves);
  for (std::uint32_t i = 0; i < d.num_leaves; ++i) nodes[i] = {i};
  std::map<std::vector<std::uint32_t>, double> out;
  for (const auto& m : d.merges) {
    auto u = nodes[m.left];
    u.insert(u.end(), nodes[m.right].begin(), nodes[m.right].end());
    std::sort(u.begin(), u.end());
    out[u] = m.height;
    nodes.push_back(std::move(u));
  }
  return out;
}

/// True when both dendrograms form the same clusters and every height
/// agrees within `rel_tol` relative (absolute near zero).
inline bool equivalent(const Dendrogram& a, const Dendrogram& b, double rel_tol,
                       double* worst = nullptr) {
  const auto sa = merge_sets(a), sb = merge_sets(b);
  if (sa.size() != sb.size()) return false;
  double w = 0;
  for (const auto& [set, h] : sa) {
    auto it = sb.find(set);
    if (it == sb.end()) return false;
    const double scale = std::max({std::abs(h), std::abs(it->second), 1e-300});
    w = std::max(w, std::abs(h - it->second) / scale);
  }
  if (worst) *worst = w;
  return w <= rel_tol;
}

/// Set partition as a canonical sorted list of sorted member lists.
inline std::vector<std::vector<std::uint32_t>> as_partition(std::span<const std::uint32_t> labels) {
  std::map<std::uint32_t, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  std::sort(out.begin(), out.end());
  return out;
}

/// Mean silhouette with Euclidean distance, straight from the definition.
inline double silhouette_direct(const Points& p, std::span<const std::uint32_t> labels) {
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t d = 0; d < p.cols; ++d) {
      const double diff = double(p.data[i * p.cols + d]) - p.data[j * p.cols + d];
      s += diff * diff;
    }
    return std::sqrt(s);
  };
  std::map<std::uint32_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  double total = 0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const auto& own = groups[labels[i]];
    if (own.size() == 1) continue;
    double a = 0;
    for (auto j : own) a += dist(i, j);
    a /= static_cast<double>(own.size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [lab, g] : groups) {
      if (lab == labels[i]) continue;
      double s = 0;
      for (auto j : g) s += dist(i, j);
      b = std::min(b, s / static_cast<double>(g.size()));
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(p.rows);
}

}  // namespace latentc::testing
