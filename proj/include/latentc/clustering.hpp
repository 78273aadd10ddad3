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

// Ward agglomerative clustering.
//
// Heights follow the Lance-Williams Ward recurrence seeded with squared
// Euclidean distances (no 1/2 factor, no square root):
//
//   d(i, j)       = |x_i - x_j|^2
//   d(i+j, k)     = ((n_i+n_k) d(i,k) + (n_j+n_k) d(j,k) - n_k d(i,j)) / (n_i+n_j+n_k)
//
// which equals 2 n_a n_b / (n_a + n_b) * |centroid_a - centroid_b|^2 for any
// two clusters a, b. The NN-chain engine uses the centroid form so it never
// holds more than the N x D centroid table.
//
// Node ids: leaves are 0..N-1, merge m creates node N+m. Merges are emitted
// in non-decreasing height; equal heights are ordered by the smallest
// (min node id, max node id) pair.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "latentc/embedding_store.hpp"

namespace latentc {

struct Merge {
  std::uint32_t left = 0;   // smaller node id
  std::uint32_t right = 0;  // larger node id
  double height = 0.0;
  std::uint32_t size = 0;

  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::size_t num_leaves = 0;
  std::vector<Merge> merges;

  bool operator==(const Dendrogram&) const = default;
};

enum class Engine { nnchain, naive };

Engine parse_engine(std::string_view name);
std::string_view to_string(Engine engine);

/// O(N*D) memory nearest-neighbour-chain Ward clustering.
Dendrogram build_dendrogram_nnchain(const MatrixView& points);

/// Textbook O(N^2) memory, O(N^3) time Ward clustering over the
/// Lance-Williams matrix. Reference implementation for the NN-chain engine.
Dendrogram build_dendrogram_naive(const MatrixView& points);

Dendrogram build_dendrogram(const MatrixView& points, Engine engine);

/// Number of merges whose height is below the previous merge's height.
std::size_t count_height_violations(const Dendrogram& d);

/// Throws an invariant error unless the dendrogram is structurally sound
/// (N-1 merges, each node consumed once, sizes add up, heights monotone).
void check_dendrogram(const Dendrogram& d);

struct ClusterModel {
  std::size_t k = 0;
  std::uint32_t layer = 0;
  std::vector<std::uint32_t> assignment;  // row -> cluster id in [0, k)

  /// Row indices grouped by cluster id, each group ascending.
  std::vector<std::vector<std::uint32_t>> members() const;
};

/// Undoes the last K-1 merges. Cluster ids are dense and ordered by each
/// cluster's smallest leaf id.
ClusterModel cut(const Dendrogram& d, std::size_t k, std::uint32_t layer = 0);

struct KDiagnostics {
  std::vector<std::size_t> k;
  std::vector<double> distortion;  // within-cluster sum of squared distances to centroid
  std::vector<double> silhouette;  // mean silhouette, Euclidean distance
};

/// Elbow and silhouette diagnostics from cuts of one dendrogram. Candidates
/// must lie in [2, N-1]. Pairwise distances are streamed row by row.
KDiagnostics k_diagnostics(const MatrixView& points, const Dendrogram& d,
                           std::span<const std::size_t> k_candidates);
KDiagnostics k_diagnostics(const MatrixView& points, std::span<const std::size_t> k_candidates);

double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

/// TSV `merge_index	left	right	height	new_size`.
void write_dendrogram_tsv(std::ostream& out, const Dendrogram& d);

}  // namespace latentc
