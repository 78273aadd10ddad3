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

#include "latentc/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "latentc/alignment.hpp"
#include "latentc/errors.hpp"
#include "latentc/rng.hpp"

namespace latentc {

namespace {

constexpr double kWeightTolerance = 1e-9;

std::uint64_t tag(std::uint64_t kind, std::uint64_t index) { return (kind << 40) | index; }

std::string member_word(std::size_t cluster, std::size_t member) {
  return "c" + std::to_string(cluster) + "m" + std::to_string(member);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw data_error("cannot write " + path.string());
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.layers < 1 || spec.dim < 1) throw usage_error("synth: layers and dim must be >= 1");
  if (spec.sentence_length < 1) throw usage_error("synth: sentence_length must be >= 1");
  if (!(spec.theta > 0.0 && spec.theta <= 1.0)) throw usage_error("synth: theta must lie in (0, 1]");
  if (spec.max_n < 1) throw usage_error("synth: max_n must be >= 1");
  if (spec.clusters.empty()) throw usage_error("synth: no clusters");
  std::set<std::string> schemes;
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    const auto& cl = spec.clusters[c];
    const auto where = "synth cluster " + std::to_string(c) + ": ";
    if (cl.size < 1) throw usage_error(where + "size must be >= 1");
    if (!(cl.sigma >= 0.0) || !std::isfinite(cl.sigma)) throw usage_error(where + "sigma must be >= 0");
    for (const auto& [scheme, labels] : cl.mixture) {
      double sum = 0;
      std::set<std::string> seen;
      for (const auto& lw : labels) {
        if (lw.label.empty() || !(lw.weight >= 0.0)) throw usage_error(where + "bad label weight in " + scheme);
        if (!seen.insert(lw.label).second) throw usage_error(where + "label '" + lw.label + "' repeated");
        sum += lw.weight;
      }
      if (std::abs(sum - 1.0) > kWeightTolerance) {
        throw usage_error(where + scheme + " weights sum to " + std::to_string(sum) + ", not 1");
      }
      schemes.insert(scheme);
    }
  }
  for (const auto& cl : spec.clusters) {
    for (const auto& s : schemes) {
      if (!cl.mixture.count(s)) throw usage_error("synth: every cluster needs a mixture for scheme " + s);
    }
  }
}

SynthSpec parse_synth_spec(const ConfigFile& cfg) {
  SynthSpec spec;
  for (const auto& e : cfg.entries) {
    try {
      if (e.key == "layers") {
        spec.layers = static_cast<std::uint32_t>(parse_u64(e.value, e.key));
      } else if (e.key == "dim") {
        spec.dim = static_cast<std::uint32_t>(parse_u64(e.value, e.key));
      } else if (e.key == "seed") {
        spec.seed = parse_u64(e.value, e.key);
      } else if (e.key == "sentence_length") {
        spec.sentence_length = parse_u64(e.value, e.key);
      } else if (e.key == "theta") {
        spec.theta = parse_double(e.value, e.key);
      } else if (e.key == "max_n") {
        spec.max_n = parse_u64(e.value, e.key);
      } else if (e.key == "cluster") {
        // <size> <sigma> <scheme>:<label>=<w>,...[;<scheme>:...]
        std::istringstream in(e.value);
        std::string size, sigma, mixtures;
        in >> size >> sigma >> mixtures;
        if (mixtures.empty()) cfg.fail(e, "expected '<size> <sigma> <scheme>:<label>=<weight>,...'");
        SynthCluster cl;
        cl.size = parse_u64(size, "cluster size");
        cl.sigma = parse_double(sigma, "cluster sigma");
        std::size_t start = 0;
        while (start <= mixtures.size()) {
          const auto semi = mixtures.find(';', start);
          const auto part = mixtures.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
          const auto colon = part.find(':');
          if (colon == std::string::npos || colon == 0) cfg.fail(e, "mixture '" + part + "' lacks '<scheme>:'");
          auto& labels = cl.mixture[part.substr(0, colon)];
          for (const auto& item : split_list(part.substr(colon + 1))) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) cfg.fail(e, "expected <label>=<weight>, got '" + item + "'");
            labels.push_back({item.substr(0, eq), parse_double(item.substr(eq + 1), "label weight")});
          }
          if (semi == std::string::npos) break;
          start = semi + 1;
        }
        spec.clusters.push_back(std::move(cl));
      } else {
        cfg.fail(e, "unknown synth key");
      }
    } catch (Error& err) {
      if (!err.message().starts_with(cfg.where(e))) cfg.fail(e, err.message());
      throw;
    }
  }
  validate(spec);
  return spec;
}

namespace {

const std::vector<std::string>& tag_pool() {
  static const std::vector<std::string> pool{"CD", "DT", "IN", "JJ", "NN", "NNP", "NNS", "PRP", "RB", "VB", "VBD"};
  return pool;
}

SynthCluster planted(std::size_t index, std::size_t size, const std::vector<double>& weights) {
  SynthCluster c;
  c.size = size;
  c.sigma = 0.05;
  auto& labels = c.mixture["POS"];
  const auto& pool = tag_pool();
  for (std::size_t j = 0; j < weights.size(); ++j) {
    labels.push_back({pool[(index + 3 * j) % pool.size()], weights[j]});
  }
  return c;
}

}  // namespace

SynthSpec preset_mixed20(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t size = 20 + (i * 7) % 21;
    if (i < 6) {
      spec.clusters.push_back(planted(i, size, {1.0}));
    } else if (i < 14) {
      spec.clusters.push_back(planted(i, size, {0.6, 0.4}));
    } else {
      spec.clusters.push_back(planted(i, size, {0.5, 0.3, 0.2}));
    }
  }
  validate(spec);
  return spec;
}

SynthSpec preset_pure4(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  for (std::size_t i = 0; i < 4; ++i) spec.clusters.push_back(planted(i, 25, {1.0}));
  validate(spec);
  return spec;
}

std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total) {
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> rem(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact + kWeightTolerance));
    rem[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  if (assigned > total) throw invariant_error("largest remainder: weights exceed 1");
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[order[i % order.size()]];
  return counts;
}

SynthTruth synth_truth(const SynthSpec& spec) {
  validate(spec);
  SynthTruth truth;
  std::set<std::string> schemes;
  for (const auto& cl : spec.clusters) {
    for (const auto& [s, _] : cl.mixture) schemes.insert(s);
  }
  for (const auto& s : schemes) truth.histogram[s].assign(spec.max_n + 1, 0);

  std::size_t aligned = 0;
  for (const auto& cl : spec.clusters) {
    SynthTruthCluster t;
    t.size = cl.size;
    for (const auto& [scheme, labels] : cl.mixture) {
      std::vector<double> w;
      for (const auto& lw : labels) w.push_back(lw.weight);
      const auto counts = largest_remainder(w, cl.size);
      std::vector<std::size_t> nonzero;
      for (std::size_t j = 0; j < labels.size(); ++j) {
        if (counts[j] == 0) continue;
        t.counts[scheme][labels[j].label] = counts[j];
        nonzero.push_back(counts[j]);
        if (meets_theta(counts[j], cl.size, spec.theta)) t.aligned_labels.push_back(scheme + ":" + labels[j].label);
      }
      // classes are disjoint inside a cluster: the best N labels are the N largest
      std::sort(nonzero.rbegin(), nonzero.rend());
      std::size_t covered = 0, n = 0;
      for (std::size_t j = 0; j < nonzero.size() && j < spec.max_n; ++j) {
        covered += nonzero[j];
        if (meets_theta(covered, cl.size, spec.theta)) {
          n = j + 1;
          break;
        }
      }
      t.minimal_n[scheme] = n;
      ++truth.histogram[scheme][n];
    }
    std::sort(t.aligned_labels.begin(), t.aligned_labels.end());
    aligned += !t.aligned_labels.empty();
    truth.clusters.push_back(std::move(t));
  }
  truth.aligned_fraction = static_cast<double>(aligned) / static_cast<double>(spec.clusters.size());
  return truth;
}

SynthOutput generate_synthetic(const SynthSpec& spec, const std::filesystem::path& dir) {
  validate(spec);
  const auto truth = synth_truth(spec);
  std::filesystem::create_directories(dir / "annotations");

  struct Member {
    std::size_t cluster;
    std::size_t index;
  };
  std::vector<Member> members;
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    for (std::size_t m = 0; m < spec.clusters[c].size; ++m) members.push_back({c, m});
  }
  {
    std::mt19937_64 rng(derive_seed(spec.seed, tag(1, 0)));
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[uniform_below(rng, i)]);
  }

  // centres per layer, pairwise at least 20 * sigma * sqrt(D) apart
  double sigma_max = 0;
  for (const auto& cl : spec.clusters) sigma_max = std::max(sigma_max, cl.sigma);
  const double min_sep = sigma_max > 0 ? 20.0 * sigma_max * std::sqrt(static_cast<double>(spec.dim)) : 1.0;
  const std::size_t k = spec.clusters.size();
  std::vector<std::vector<double>> centres(spec.layers);  // [layer][cluster * D + d]
  for (std::uint32_t l = 0; l < spec.layers; ++l) {
    std::mt19937_64 rng(derive_seed(spec.seed, tag(2, l)));
    double scale = 2.0 * min_sep * std::max(1.0, std::pow(static_cast<double>(k), 1.0 / spec.dim));
    auto& ctr = centres[l];
    while (true) {
      ctr.assign(k * spec.dim, 0.0);
      bool ok = true;
      for (std::size_t c = 0; c < k && ok; ++c) {
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
          for (std::size_t d = 0; d < spec.dim; ++d) ctr[c * spec.dim + d] = scale * standard_normal(rng);
          placed = true;
          for (std::size_t o = 0; o < c && placed; ++o) {
            double dist = 0;
            for (std::size_t d = 0; d < spec.dim; ++d) {
              const double diff = ctr[c * spec.dim + d] - ctr[o * spec.dim + d];
              dist += diff * diff;
            }
            placed = std::sqrt(dist) >= min_sep;
          }
        }
        ok = placed;
      }
      if (ok) break;
      scale *= 1.5;
    }
  }

  // corpus and dataset
  std::string corpus_text;
  EmbeddingDataset ds;
  ds.num_layers = spec.layers;
  ds.dim = spec.dim;
  std::vector<std::vector<std::string>> rows_by_scheme;
  std::vector<std::string> scheme_names;
  for (const auto& [s, _] : truth.histogram) scheme_names.push_back(s);
  rows_by_scheme.resize(scheme_names.size());

  // label of member m in cluster c for every scheme, by cumulative counts
  std::vector<std::vector<std::vector<std::string>>> member_labels(spec.clusters.size());
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    const auto& cl = spec.clusters[c];
    member_labels[c].resize(scheme_names.size());
    for (std::size_t s = 0; s < scheme_names.size(); ++s) {
      const auto& labels = cl.mixture.at(scheme_names[s]);
      std::vector<double> w;
      for (const auto& lw : labels) w.push_back(lw.weight);
      const auto counts = largest_remainder(w, cl.size);
      for (std::size_t j = 0; j < labels.size(); ++j) {
        member_labels[c][s].insert(member_labels[c][s].end(), counts[j], labels[j].label);
      }
    }
  }

  std::vector<float> values(std::size_t{spec.layers} * spec.dim);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto sentence = static_cast<std::uint32_t>(i / spec.sentence_length);
    const auto position = static_cast<std::uint32_t>(i % spec.sentence_length);
    const auto [c, m] = members[i];
    const auto word = member_word(c, m);
    if (position > 0) corpus_text += ' ';
    corpus_text += word;
    if (position + 1 == spec.sentence_length || i + 1 == members.size()) corpus_text += '\n';

    const auto word_id = static_cast<WordId>(ds.vocab.size());
    ds.vocab.push_back(word);
    std::mt19937_64 rng(derive_seed(spec.seed, tag(3, i)));
    for (std::uint32_t l = 0; l < spec.layers; ++l) {
      for (std::size_t d = 0; d < spec.dim; ++d) {
        values[l * spec.dim + d] = static_cast<float>(centres[l][c * spec.dim + d] +
                                                      spec.clusters[c].sigma * standard_normal(rng));
      }
    }
    ds.add_record({word_id, sentence, position}, values);
    for (std::size_t s = 0; s < scheme_names.size(); ++s) {
      rows_by_scheme[s].push_back(std::to_string(sentence) + '\t' + std::to_string(position) + '\t' + word + '\t' +
                                  member_labels[c][s][m]);
    }
  }

  SynthOutput out;
  out.corpus = dir / "corpus.txt";
  out.embeddings = dir / "embeddings.ecx";
  out.truth = dir / "truth.json";
  out.config = dir / "pipeline.conf";
  write_text(out.corpus, corpus_text);
  write_dataset(ds, out.embeddings);
  for (std::size_t s = 0; s < scheme_names.size(); ++s) {
    std::string text = "sentence_id\tposition\tword\tlabel\n";
    for (const auto& r : rows_by_scheme[s]) text += r + '\n';
    const auto path = dir / "annotations" / (scheme_names[s] + ".tsv");
    write_text(path, text);
    out.annotations[scheme_names[s]] = path;
  }

  nlohmann::ordered_json j;
  j["spec"] = {{"layers", spec.layers},         {"dim", spec.dim},     {"seed", spec.seed},
               {"sentence_length", spec.sentence_length}, {"theta", spec.theta}, {"max_n", spec.max_n},
               {"min_centre_separation", min_sep}, {"rounding", "largest_remainder"}};
  auto& clusters = j["clusters"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < truth.clusters.size(); ++c) {
    const auto& t = truth.clusters[c];
    nlohmann::ordered_json jc;
    jc["planted_id"] = c;
    jc["size"] = t.size;
    jc["sigma"] = spec.clusters[c].sigma;
    jc["counts"] = t.counts;
    jc["aligned_labels"] = t.aligned_labels;
    jc["minimal_n"] = t.minimal_n;
    clusters.push_back(std::move(jc));
  }
  j["aligned_fraction"] = truth.aligned_fraction;
  auto& hist = j["histogram"] = nlohmann::ordered_json::object();
  for (const auto& [s, counts] : truth.histogram) {
    nlohmann::ordered_json h;
    for (std::size_t n = 1; n < counts.size(); ++n) h[std::to_string(n)] = counts[n];
    h["unexplained"] = counts[0];
    hist[s] = std::move(h);
  }
  write_text(out.truth, j.dump(2) + "\n");

  std::string conf = "# synthetic dataset, seed " + std::to_string(spec.seed) + "\n";
  conf += "corpus = corpus.txt\nembeddings = embeddings.ecx\n";
  for (const auto& s : scheme_names) conf += "annotation." + s + " = annotations/" + s + ".tsv\n";
  conf += "k = " + std::to_string(k) + "\n";
  char theta[32];
  const auto end = std::to_chars(theta, theta + sizeof theta, spec.theta).ptr;
  conf += "theta = " + std::string(theta, end) + "\n";
  conf += "max_n = " + std::to_string(spec.max_n) + "\n";
  conf += "min_frequency = 1\nmax_occurrences = " + std::to_string(members.size()) + "\n";
  conf += "mode = " + (scheme_names.size() == 1 ? "within:" + scheme_names[0] : std::string("cross")) + "\n";
  conf += "seed = " + std::to_string(spec.seed) + "\n";
  write_text(out.config, conf);
  return out;
}

}  // namespace latentc
