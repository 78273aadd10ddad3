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

// End-to-end orchestration: inputs -> per-layer clusters -> alignment and
// composition reports. Every stage reads what earlier stages wrote into the
// output directory, so stages can run one at a time or all at once.
//
// Output layout (under cfg.out):
//   occurrences.tsv, ingest.json              ingest
//   layer_<l>/dendrogram.tsv, clusters.tsv    cluster
//   layer_<l>/k_diagnostics.tsv               cluster, when k_diagnostics is set
//   alignment.json, alignment.tsv             align
//   composition.json, composition_histogram.tsv,
//   layer_<l>/composition_histogram.tsv       compose
//   summary.json, plots/<scheme>.csv, plots/overall.csv   report

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latentc/alignment.hpp"
#include "latentc/annotator.hpp"
#include "latentc/clustering.hpp"
#include "latentc/composition.hpp"
#include "latentc/config.hpp"
#include "latentc/corpus.hpp"
#include "latentc/embedding_store.hpp"

namespace latentc {

struct AnnotationSource {
  std::string scheme;
  std::filesystem::path path;
  bool lexicon = false;  // type-level `label word` file instead of token TSV
};

struct CoarseSource {
  std::string scheme;
  std::string source;  // "builtin:pos", "builtin:sem" or a TSV path
};

struct PipelineConfig {
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path out;
  std::vector<AnnotationSource> annotations;
  std::vector<CoarseSource> coarse;
  std::vector<std::string> auto_annotators;  // casing, suffix, ngram, position
  std::filesystem::path suffix_lexicon;      // empty: built-in list
  std::size_t k = 1000;
  double theta = 0.9;
  std::vector<std::uint32_t> layers;  // empty: every layer in the dataset
  FilterConfig filter;
  std::uint64_t seed = 0;
  std::size_t max_n = 6;
  CompositionMode mode;
  Engine engine = Engine::nnchain;
  Denominator denominator = Denominator::cluster;
  std::vector<std::size_t> k_diagnostics;
};

/// Keys mirror the fields: corpus, embeddings, out, annotation.<scheme>,
/// lexicon.<scheme>, coarse.<scheme>, auto, suffix_lexicon, k, theta,
/// layers, min_frequency, max_occurrences, seed, max_n, mode, engine,
/// denominator, k_diagnostics. Relative paths resolve against the file.
PipelineConfig pipeline_config(const ConfigFile& file);
void validate(const PipelineConfig& cfg);

/// Loaded inputs with records restricted by the frequency filter.
struct PipelineInputs {
  Corpus corpus;
  EmbeddingDataset dataset;        // record word ids rewritten to corpus ids
  std::vector<std::size_t> rows;   // kept record indices, corpus order
  std::vector<std::uint32_t> layers;
  std::size_t dropped = 0;

  std::vector<RecordKey> keys() const;
  OccurrenceSet occurrences() const;
  LayerSlice slice(std::uint32_t layer) const;
};

PipelineInputs load_inputs(const PipelineConfig& cfg);

/// All schemes named in the config, sorted by name; names are unique.
std::vector<ConceptScheme> build_schemes(const PipelineConfig& cfg, const Corpus& corpus,
                                         const OccurrenceSet& occurrences);

struct LayerClusters {
  std::uint32_t layer = 0;
  std::vector<RecordKey> keys;  // row order
  ClusterModel model;
};

/// `cluster_id word sentence_id position`, one row per clustered occurrence.
void write_clusters_tsv(std::ostream& out, const LayerClusters& clusters, const Corpus& corpus);
LayerClusters read_clusters_tsv(const std::filesystem::path& path, std::uint32_t layer, const Corpus& corpus);

struct LayerAnalysis {
  std::uint32_t layer = 0;
  std::vector<std::vector<WordOccurrence>> members;
  std::vector<ClusterAlignment> alignments;
  std::vector<ClusterComposition> compositions;
  CompositionHistogram histogram;
};

struct PipelineResult {
  std::vector<std::string> schemes;
  std::vector<LayerAnalysis> layers;
  AlignmentSummary summary;
  CompositionHistogram histogram;  // pooled over layers
};

enum class Stage { ingest, cluster, align, compose, report, pipeline };

Stage parse_stage(std::string_view name);
std::string_view to_string(Stage s);

/// Runs one stage (or all of them for Stage::pipeline). Returns the analysis
/// for stages that compute one.
std::optional<PipelineResult> run_stage(Stage stage, const PipelineConfig& cfg);
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// CSV `layer,aligned_count,normalized_count` per scheme plus overall.csv
/// (`layer,clusters,aligned_clusters,aligned_fraction`).
void emit_plot_data(const AlignmentSummary& summary, const std::filesystem::path& dir);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace latentc
