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

// Synthetic datasets with planted clusters and planted label mixtures.
//
// Every cluster is an isotropic Gaussian blob in every layer; the member
// partition is shared by all layers. Each member gets exactly one label per
// scheme, so the alignment and the minimal composition of every cluster
// follow from the label counts alone. Those answers are written to
// truth.json next to the data.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "latentc/config.hpp"
#include "latentc/embedding_store.hpp"

namespace latentc {

struct LabelWeight {
  std::string label;
  double weight = 0.0;
};

struct SynthCluster {
  std::size_t size = 0;
  double sigma = 0.05;
  std::map<std::string, std::vector<LabelWeight>> mixture;  // scheme -> labels
};

struct SynthSpec {
  std::uint32_t layers = 3;
  std::uint32_t dim = 8;
  std::uint64_t seed = 0;
  std::size_t sentence_length = 12;
  double theta = 0.9;  // used for the truth sidecar and the emitted pipeline config
  std::size_t max_n = 6;
  std::vector<SynthCluster> clusters;
};

void validate(const SynthSpec& spec);

/// Keys: layers, dim, seed, sentence_length, theta, max_n, and repeated
/// `cluster = <size> <sigma> <scheme>:<label>=<w>,<label>=<w>[;<scheme>:...]`.
SynthSpec parse_synth_spec(const ConfigFile& cfg);

/// 20 clusters: 6 pure, 8 two-label and 6 three-label POS mixtures.
SynthSpec preset_mixed20(std::uint64_t seed = 0);
/// 4 pure POS clusters.
SynthSpec preset_pure4(std::uint64_t seed = 0);

/// Member counts for weights summing to 1 (largest remainder, ties to the
/// earlier label).
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total);

struct SynthTruthCluster {
  std::size_t size = 0;
  std::map<std::string, std::map<std::string, std::size_t>> counts;  // scheme -> label -> members
  std::vector<std::string> aligned_labels;                           // "scheme:label"
  std::map<std::string, std::size_t> minimal_n;                      // scheme -> N, 0 if none <= max_n
};

struct SynthTruth {
  std::vector<SynthTruthCluster> clusters;
  double aligned_fraction = 0.0;
  /// scheme -> counts[N] for N in 0..max_n, where counts[0] is unexplained
  std::map<std::string, std::vector<std::size_t>> histogram;
};

/// Derives the expected answers from the label counts alone.
SynthTruth synth_truth(const SynthSpec& spec);

struct SynthOutput {
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path truth;
  std::filesystem::path config;
  std::map<std::string, std::filesystem::path> annotations;
};

/// Writes corpus.txt, embeddings.ecx, annotations/<scheme>.tsv, truth.json
/// and pipeline.conf into `dir`.
SynthOutput generate_synthetic(const SynthSpec& spec, const std::filesystem::path& dir);

}  // namespace latentc
