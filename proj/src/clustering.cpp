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

#include "latentc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <tuple>

#include "latentc/errors.hpp"

namespace latentc {

Engine parse_engine(std::string_view name) {
  if (name == "nnchain") return Engine::nnchain;
  if (name == "naive") return Engine::naive;
  throw usage_error("unknown engine '" + std::string(name) + "' (expected nnchain|naive)");
}

std::string_view to_string(Engine engine) {
  return engine == Engine::nnchain ? "nnchain" : "naive";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_input(const MatrixView& points) {
  if (points.rows == 0) throw data_error("clustering: empty input");
  if (points.cols == 0 || points.data.size() != points.rows * points.cols) {
    throw data_error("clustering: matrix shape does not match its data");
  }
  for (std::size_t i = 0; i < points.data.size(); ++i) {
    if (!std::isfinite(points.data[i])) {
      throw data_error("clustering: non-finite value at row " + std::to_string(i / points.cols));
    }
  }
}

// Four partial sums; both engines share this so leaf-level distances are
// bit-identical between them.
inline double squared_distance(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

std::vector<double> to_double(const MatrixView& points) {
  return std::vector<double>(points.data.begin(), points.data.end());
}

using PairKey = std::tuple<double, std::uint32_t, std::uint32_t>;

PairKey pair_key(double d, std::uint32_t a, std::uint32_t b) {
  return {d, std::min(a, b), std::max(a, b)};
}

}  // namespace

Dendrogram build_dendrogram_naive(const MatrixView& points) {
  check_input(points);
  const std::size_t n = points.rows;
  const std::size_t dim = points.cols;
  const auto x = to_double(points);

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = squared_distance(&x[i * dim], &x[j * dim], dim);
    }
  }

  std::vector<std::uint32_t> node(n);
  std::vector<std::uint32_t> size(n, 1);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) node[i] = static_cast<std::uint32_t>(i);

  Dendrogram out;
  out.num_leaves = n;
  out.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    PairKey best{kInf, 0, 0};
    std::size_t ba = 0, bb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const auto key = pair_key(dist[i * n + j], node[i], node[j]);
        if (key < best) {
          best = key;
          ba = i;
          bb = j;
        }
      }
    }
    const double dab = dist[ba * n + bb];
    const double na = size[ba], nb = size[bb];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == ba || k == bb) continue;
      const double nk = size[k];
      const double updated =
          ((na + nk) * dist[ba * n + k] + (nb + nk) * dist[bb * n + k] - nk * dab) / (na + nb + nk);
      dist[ba * n + k] = dist[k * n + ba] = updated;
    }
    const auto [h, lo, hi] = best;
    out.merges.push_back({lo, hi, h, size[ba] + size[bb]});
    active[bb] = false;
    size[ba] += size[bb];
    node[ba] = static_cast<std::uint32_t>(n + step);
  }
  return out;
}

Dendrogram build_dendrogram_nnchain(const MatrixView& points) {
  check_input(points);
  const std::size_t n = points.rows;
  const std::size_t dim = points.cols;
  Dendrogram out;
  out.num_leaves = n;
  if (n == 1) return out;

  std::vector<double> centroid = to_double(points);
  std::vector<double> size(n, 1.0);
  std::vector<std::uint32_t> active(n);
  std::vector<std::uint32_t> where(n);  // slot -> index in `active`
  for (std::uint32_t i = 0; i < n; ++i) active[i] = where[i] = i;

  // Merges in discovery order. Children are encoded as leaf index (< n) or
  // n + index of an earlier raw merge; code[slot] is what a slot holds.
  struct RawMerge {
    std::uint32_t a, b;
    double height;
    std::uint32_t size;
  };
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);
  std::vector<std::uint32_t> code(n);
  for (std::uint32_t i = 0; i < n; ++i) code[i] = i;

  auto ward = [&](std::uint32_t a, std::uint32_t b) {
    const double na = size[a], nb = size[b];
    return (2.0 * na * nb / (na + nb)) *
           squared_distance(&centroid[a * dim], &centroid[b * dim], dim);
  };

  std::vector<std::uint32_t> chain;
  chain.reserve(n);
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  while (raw.size() + 1 < n) {
    if (chain.empty()) chain.push_back(active.front());
    const std::uint32_t a = chain.back();
    const std::uint32_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : kNone;

    // Nearest neighbour of `a`; the previous chain element wins ties so the
    // chain always terminates, otherwise the smaller code wins.
    std::uint32_t best = prev;
    double best_d = prev == kNone ? kInf : ward(a, prev);
    for (const std::uint32_t x : active) {
      if (x == a || x == prev) continue;
      const double d = ward(a, x);
      if (d < best_d || (d == best_d && best != prev && code[x] < code[best])) {
        best_d = d;
        best = x;
      }
    }

    if (best != prev) {
      chain.push_back(best);
      continue;
    }

    chain.pop_back();
    chain.pop_back();
    const std::uint32_t keep = std::min(a, best);
    const std::uint32_t drop = std::max(a, best);
    raw.push_back({code[keep], code[drop], best_d,
                   static_cast<std::uint32_t>(size[keep] + size[drop])});

    const double nk = size[keep], nd = size[drop];
    double* ck = &centroid[keep * dim];
    const double* cd = &centroid[drop * dim];
    for (std::size_t i = 0; i < dim; ++i) ck[i] = (nk * ck[i] + nd * cd[i]) / (nk + nd);
    size[keep] = nk + nd;
    code[keep] = static_cast<std::uint32_t>(n + raw.size() - 1);

    const std::uint32_t pos = where[drop];
    active[pos] = active.back();
    where[active[pos]] = pos;
    active.pop_back();
  }

  // Replay in canonical order: lowest height among merges whose children
  // already exist, ties broken by (min node id, max node id). This is the
  // order the naive engine picks merges in.
  std::vector<std::uint32_t> parent(2 * n - 1, kNone);
  for (std::uint32_t r = 0; r < raw.size(); ++r) parent[raw[r].a] = parent[raw[r].b] = r;
  std::vector<std::uint32_t> emitted(n - 1, kNone);
  std::vector<std::uint8_t> waiting(n - 1, 0);
  auto id_of = [&](std::uint32_t c) { return c < n ? c : emitted[c - n]; };

  using Item = std::tuple<double, std::uint32_t, std::uint32_t, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  auto push_ready = [&](std::uint32_t r) {
    const auto ia = id_of(raw[r].a), ib = id_of(raw[r].b);
    ready.emplace(raw[r].height, std::min(ia, ib), std::max(ia, ib), r);
  };
  for (std::uint32_t r = 0; r < raw.size(); ++r) {
    waiting[r] = static_cast<std::uint8_t>((raw[r].a >= n) + (raw[r].b >= n));
    if (waiting[r] == 0) push_ready(r);
  }

  out.merges.reserve(n - 1);
  while (!ready.empty()) {
    const auto [h, lo, hi, r] = ready.top();
    ready.pop();
    emitted[r] = static_cast<std::uint32_t>(n + out.merges.size());
    out.merges.push_back({lo, hi, h, raw[r].size});
    const auto p = parent[n + r];
    if (p != kNone && --waiting[p] == 0) push_ready(p);
  }
  return out;
}

Dendrogram build_dendrogram(const MatrixView& points, Engine engine) {
  return engine == Engine::nnchain ? build_dendrogram_nnchain(points)
                                   : build_dendrogram_naive(points);
}

std::size_t count_height_violations(const Dendrogram& d) {
  std::size_t bad = 0;
  for (std::size_t m = 1; m < d.merges.size(); ++m) {
    if (d.merges[m].height < d.merges[m - 1].height) ++bad;
  }
  return bad;
}

void check_dendrogram(const Dendrogram& d) {
  const std::size_t n = d.num_leaves;
  if (n == 0) throw invariant_error("dendrogram has no leaves");
  if (d.merges.size() != n - 1) {
    throw invariant_error("dendrogram has " + std::to_string(d.merges.size()) +
                          " merges, expected " + std::to_string(n - 1));
  }
  std::vector<std::uint32_t> sizes(2 * n - 1, 1);
  std::vector<bool> used(2 * n - 1, false);
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    const auto& mg = d.merges[m];
    const std::size_t created = n + m;
    if (mg.left >= mg.right || mg.right >= created || used[mg.left] || used[mg.right]) {
      throw invariant_error("dendrogram merge " + std::to_string(m) + " references an invalid node");
    }
    used[mg.left] = used[mg.right] = true;
    sizes[created] = sizes[mg.left] + sizes[mg.right];
    if (mg.size != sizes[created]) {
      throw invariant_error("dendrogram merge " + std::to_string(m) + " has inconsistent size");
    }
  }
  if (const auto bad = count_height_violations(d); bad != 0) {
    throw invariant_error("dendrogram has " + std::to_string(bad) + " decreasing merge heights");
  }
}

std::vector<std::vector<std::uint32_t>> ClusterModel::members() const {
  std::vector<std::vector<std::uint32_t>> out(k);
  for (std::uint32_t r = 0; r < assignment.size(); ++r) out[assignment[r]].push_back(r);
  return out;
}

ClusterModel cut(const Dendrogram& d, std::size_t k, std::uint32_t layer) {
  const std::size_t n = d.num_leaves;
  if (k < 1 || k > n) {
    throw usage_error("cut: K=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<std::uint32_t> parent(2 * n - 1);
  for (std::uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
  for (std::size_t m = 0; m < n - k; ++m) {
    const auto created = static_cast<std::uint32_t>(n + m);
    parent[d.merges[m].left] = created;
    parent[d.merges[m].right] = created;
  }
  auto find = [&](std::uint32_t x) {
    std::uint32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const auto next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  };

  ClusterModel model;
  model.k = k;
  model.layer = layer;
  model.assignment.resize(n);
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(2 * n - 1, kUnset);
  std::uint32_t next = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto root = find(i);
    if (label[root] == kUnset) label[root] = next++;
    model.assignment[i] = label[root];
  }
  if (next != k) throw invariant_error("cut produced " + std::to_string(next) + " clusters");
  return model;
}

KDiagnostics k_diagnostics(const MatrixView& points, const Dendrogram& d,
                           std::span<const std::size_t> k_candidates) {
  check_input(points);
  const std::size_t n = points.rows;
  const std::size_t dim = points.cols;
  if (d.num_leaves != n) throw usage_error("k_diagnostics: dendrogram does not match points");
  for (const auto k : k_candidates) {
    if (k < 2 || k + 1 > n) {
      throw usage_error("k_diagnostics: candidate K=" + std::to_string(k) + " outside [2, N-1]");
    }
  }
  const auto x = to_double(points);

  KDiagnostics out;
  std::vector<ClusterModel> models;
  for (const auto k : k_candidates) {
    models.push_back(cut(d, k));
    const auto& model = models.back();
    std::vector<double> centroid(k * dim, 0.0);
    std::vector<double> count(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = model.assignment[i];
      count[c] += 1.0;
      for (std::size_t j = 0; j < dim; ++j) centroid[c * dim + j] += x[i * dim + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < dim; ++j) centroid[c * dim + j] /= count[c];
    }
    double distortion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      distortion += squared_distance(&x[i * dim], &centroid[model.assignment[i] * dim], dim);
    }
    out.k.push_back(k);
    out.distortion.push_back(distortion);
  }

  std::vector<double> row(n);
  std::vector<std::vector<double>> sums(models.size());
  std::vector<std::vector<std::size_t>> sizes(models.size());
  for (std::size_t c = 0; c < models.size(); ++c) {
    sizes[c].assign(models[c].k, 0);
    for (const auto a : models[c].assignment) ++sizes[c][a];
  }
  std::vector<double> total(models.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::sqrt(squared_distance(&x[i * dim], &x[j * dim], dim));
    }
    for (std::size_t c = 0; c < models.size(); ++c) {
      const auto& model = models[c];
      auto& s = sums[c];
      s.assign(model.k, 0.0);
      for (std::size_t j = 0; j < n; ++j) s[model.assignment[j]] += row[j];
      const auto own = model.assignment[i];
      if (sizes[c][own] <= 1) continue;  // singleton silhouette is 0
      const double a = s[own] / static_cast<double>(sizes[c][own] - 1);
      double b = kInf;
      for (std::size_t other = 0; other < model.k; ++other) {
        if (other != own) b = std::min(b, s[other] / static_cast<double>(sizes[c][other]));
      }
      const double denom = std::max(a, b);
      total[c] += denom > 0.0 ? (b - a) / denom : 0.0;
    }
  }
  for (const double t : total) out.silhouette.push_back(t / static_cast<double>(n));
  return out;
}

KDiagnostics k_diagnostics(const MatrixView& points, std::span<const std::size_t> k_candidates) {
  return k_diagnostics(points, build_dendrogram_nnchain(points), k_candidates);
}

double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) throw usage_error("adjusted_rand_index: label vectors differ in length");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
  std::map<std::uint32_t, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ra[a[i]] += 1;
    rb[b[i]] += 1;
  }
  auto c2 = [](double v) { return v * (v - 1) / 2; };
  double index = 0, sa = 0, sb = 0;
  for (const auto& [_, v] : joint) index += c2(v);
  for (const auto& [_, v] : ra) sa += c2(v);
  for (const auto& [_, v] : rb) sb += c2(v);
  const double expected = sa * sb / c2(n);
  const double max_index = (sa + sb) / 2;
  if (max_index == expected) return 1.0;  // both partitions trivial and equal in shape
  return (index - expected) / (max_index - expected);
}

void write_dendrogram_tsv(std::ostream& out, const Dendrogram& d) {
  out << "merge_index\tleft\tright\theight\tnew_size\n";
  const auto prec = out.precision(17);
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    const auto& mg = d.merges[m];
    out << m << '\t' << mg.left << '\t' << mg.right << '\t' << mg.height << '\t' << mg.size << '\n';
  }
  out.precision(prec);
}

}  // namespace latentc
