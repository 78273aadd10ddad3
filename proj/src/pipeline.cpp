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

#include "latentc/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "latentc/errors.hpp"
#include "latentc/tsv.hpp"

namespace latentc {

using Json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw invariant_error("cannot format double");
  return {buf, ptr};
}

// --- config ------------------------------------------------------------------

PipelineConfig pipeline_config(const ConfigFile& file) {
  PipelineConfig cfg;
  std::set<std::string> seen;
  for (const auto& e : file.entries) {
    if (!seen.insert(e.key).second) file.fail(e, "given twice");
    try {
      const auto& v = e.value;
      if (e.key == "corpus") {
        cfg.corpus = file.resolve(v);
      } else if (e.key == "embeddings") {
        cfg.embeddings = file.resolve(v);
      } else if (e.key == "out") {
        cfg.out = file.resolve(v);
      } else if (e.key.starts_with("annotation.") || e.key.starts_with("lexicon.")) {
        const bool lexicon = e.key.starts_with("lexicon.");
        const auto scheme = e.key.substr(e.key.find('.') + 1);
        if (scheme.empty()) file.fail(e, "missing scheme name");
        cfg.annotations.push_back({scheme, file.resolve(v), lexicon});
      } else if (e.key.starts_with("coarse.")) {
        const auto scheme = e.key.substr(7);
        if (scheme.empty()) file.fail(e, "missing scheme name");
        cfg.coarse.push_back({scheme, v.starts_with("builtin:") ? v : file.resolve(v).string()});
      } else if (e.key == "auto") {
        cfg.auto_annotators = split_list(v);
      } else if (e.key == "suffix_lexicon") {
        cfg.suffix_lexicon = file.resolve(v);
      } else if (e.key == "k") {
        cfg.k = parse_u64(v, e.key);
      } else if (e.key == "theta") {
        cfg.theta = parse_double(v, e.key);
      } else if (e.key == "layers") {
        cfg.layers = v == "all" ? std::vector<std::uint32_t>{} : parse_layer_list(v);
      } else if (e.key == "min_frequency") {
        cfg.filter.min_frequency = parse_u64(v, e.key);
      } else if (e.key == "max_occurrences") {
        cfg.filter.max_occurrences = parse_u64(v, e.key);
      } else if (e.key == "seed") {
        cfg.seed = parse_u64(v, e.key);
      } else if (e.key == "max_n") {
        cfg.max_n = parse_u64(v, e.key);
      } else if (e.key == "mode") {
        cfg.mode = parse_composition_mode(v);
      } else if (e.key == "engine") {
        cfg.engine = parse_engine(v);
      } else if (e.key == "denominator") {
        cfg.denominator = parse_denominator(v);
      } else if (e.key == "k_diagnostics") {
        cfg.k_diagnostics.clear();
        for (const auto& item : split_list(v)) cfg.k_diagnostics.push_back(parse_u64(item, e.key));
      } else {
        file.fail(e, "unknown key");
      }
    } catch (Error& err) {
      if (!err.message().starts_with(file.where(e))) file.fail(e, err.message());
      throw;
    }
  }
  cfg.filter.seed = cfg.seed;
  return cfg;
}

void validate(const PipelineConfig& cfg) {
  if (cfg.corpus.empty()) throw usage_error("config: corpus is required");
  if (cfg.embeddings.empty()) throw usage_error("config: embeddings is required");
  if (cfg.out.empty()) throw usage_error("config: output directory is required (--out)");
  if (cfg.k < 1) throw usage_error("config: k must be >= 1");
  validate(AlignmentConfig{cfg.theta, cfg.denominator});
  validate(CompositionConfig{cfg.theta, cfg.max_n, cfg.mode});
  if (cfg.filter.min_frequency < 1 || cfg.filter.max_occurrences < 1) {
    throw usage_error("config: min_frequency and max_occurrences must be >= 1");
  }
  for (const auto& a : cfg.auto_annotators) {
    if (a != "casing" && a != "suffix" && a != "ngram" && a != "position") {
      throw usage_error("config: unknown auto annotator '" + a + "' (casing, suffix, ngram, position)");
    }
  }
}

// --- inputs --------------------------------------------------------------------

std::vector<RecordKey> PipelineInputs::keys() const {
  std::vector<RecordKey> out;
  out.reserve(rows.size());
  for (const auto r : rows) out.push_back(dataset.records[r]);
  return out;
}

OccurrenceSet PipelineInputs::occurrences() const {
  OccurrenceSet out;
  out.reserve(rows.size());
  for (const auto r : rows) out.push_back(dataset.records[r].as_occurrence());
  return out;
}

LayerSlice PipelineInputs::slice(std::uint32_t layer) const {
  if (layer >= dataset.num_layers) {
    throw usage_error("layer " + std::to_string(layer) + " out of range, dataset has " +
                      std::to_string(dataset.num_layers));
  }
  LayerSlice s;
  s.layer = layer;
  s.dim = dataset.dim;
  s.points.reserve(rows.size() * dataset.dim);
  for (const auto r : rows) {
    const auto v = dataset.vector(r, layer);
    s.points.insert(s.points.end(), v.begin(), v.end());
    s.keys.push_back(dataset.records[r]);
  }
  return s;
}

PipelineInputs load_inputs(const PipelineConfig& cfg) {
  return with_stage("ingest", [&] {
    PipelineInputs in;
    in.corpus = load_corpus(cfg.corpus);
    in.dataset = read_dataset(cfg.embeddings);
    auto& ds = in.dataset;

    // embeddings must describe corpus tokens; switch record ids to corpus ids
    std::vector<std::optional<WordId>> remap(ds.vocab.size());
    for (std::size_t i = 0; i < ds.vocab.size(); ++i) remap[i] = in.corpus.vocab.find(ds.vocab[i]);
    std::map<std::uint64_t, std::size_t> row_of;
    OccurrenceSet available;
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
      auto& rec = ds.records[r];
      const auto slot = in.corpus.word_at(rec.occurrence());
      const auto where = "embedding record " + std::to_string(r) + " (sentence " + std::to_string(rec.sentence_id) +
                         ", position " + std::to_string(rec.position) + ")";
      if (!slot) throw data_error(where + " has no corpus token");
      if (!remap[rec.word_id] || *remap[rec.word_id] != *slot) {
        throw data_error(where + " is '" + ds.vocab[rec.word_id] + "' but the corpus has '" +
                         in.corpus.vocab.word(*slot) + "'");
      }
      rec.word_id = *slot;
      row_of[rec.occurrence().packed()] = r;
      available.push_back(rec.as_occurrence());
    }
    ds.vocab = in.corpus.vocab.words();

    for (const auto& occ : filter_occurrences(in.corpus, available, cfg.filter)) {
      in.rows.push_back(row_of.at(occ.key().packed()));
    }
    in.dropped = ds.records.size() - in.rows.size();
    if (in.rows.empty()) throw data_error("no embedding records survive the frequency filter");

    if (cfg.layers.empty()) {
      for (std::uint32_t l = 0; l < ds.num_layers; ++l) in.layers.push_back(l);
    } else {
      for (const auto l : cfg.layers) {
        if (l >= ds.num_layers) {
          throw usage_error("layer " + std::to_string(l) + " requested but the embeddings have " +
                            std::to_string(ds.num_layers) + " layers");
        }
      }
      in.layers = cfg.layers;
    }
    return in;
  });
}

// --- schemes -------------------------------------------------------------------

std::vector<ConceptScheme> build_schemes(const PipelineConfig& cfg, const Corpus& corpus,
                                         const OccurrenceSet& occurrences) {
  return with_stage("annotate", [&] {
    std::vector<ConceptScheme> out;
    for (const auto& a : cfg.annotations) {
      out.push_back(a.lexicon ? load_type_lexicon(a.path, a.scheme, corpus).scheme
                              : load_token_annotations(a.path, a.scheme, corpus));
    }
    for (const auto& c : cfg.coarse) {
      const auto base = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.name == c.scheme; });
      if (base == out.end()) throw usage_error("coarse." + c.scheme + ": no annotation loaded for " + c.scheme);
      CoarseMapping mapping;
      if (c.source == "builtin:pos") {
        mapping = builtin_pos_mapping();
      } else if (c.source == "builtin:sem") {
        mapping = builtin_sem_mapping();
      } else if (c.source.starts_with("builtin:")) {
        throw usage_error("coarse." + c.scheme + ": unknown built-in mapping '" + c.source + "'");
      } else {
        mapping = load_coarse_mapping(c.source, c.scheme);
      }
      mapping.scheme = c.scheme;
      const auto coarse = coarsen(*base, mapping);
      out.push_back(coarse);
    }
    for (const auto& a : cfg.auto_annotators) {
      if (a == "casing") {
        out.push_back(annotate_casing(occurrences, corpus));
      } else if (a == "suffix") {
        const auto lexicon = cfg.suffix_lexicon.empty() ? default_suffixes() : load_affix_lexicon(cfg.suffix_lexicon);
        out.push_back(annotate_suffix(occurrences, corpus, lexicon));
      } else if (a == "ngram") {
        out.push_back(annotate_ngram(occurrences, corpus));
      } else if (a == "position") {
        auto p = annotate_position(occurrences, corpus);
        out.push_back(std::move(p.first_word));
        out.push_back(std::move(p.last_word));
      } else {
        throw usage_error("unknown auto annotator '" + a + "'");
      }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (out[i].name == out[i - 1].name) throw usage_error("scheme '" + out[i].name + "' defined twice");
    }
    return out;
  });
}

// --- clusters on disk ------------------------------------------------------------

void write_clusters_tsv(std::ostream& out, const LayerClusters& clusters, const Corpus& corpus) {
  out << "cluster_id\tword\tsentence_id\tposition\n";
  for (std::size_t i = 0; i < clusters.keys.size(); ++i) {
    const auto& k = clusters.keys[i];
    out << clusters.model.assignment[i] << '\t' << corpus.vocab.word(k.word_id) << '\t' << k.sentence_id << '\t'
        << k.position << '\n';
  }
}

LayerClusters read_clusters_tsv(const std::filesystem::path& path, std::uint32_t layer, const Corpus& corpus) {
  tsv::Reader r(path);
  r.expect_header("cluster_id\tword\tsentence_id\tposition");
  LayerClusters lc;
  lc.layer = layer;
  lc.model.layer = layer;
  std::string_view line;
  std::uint32_t max_id = 0;
  std::set<std::uint64_t> seen;
  while (r.next(line)) {
    if (line.empty()) continue;
    const auto cols = tsv::split(line);
    if (cols.size() != 4) r.fail("expected 4 columns, found " + std::to_string(cols.size()));
    std::uint32_t id = 0;
    RecordKey key;
    if (!tsv::parse_int(cols[0], id) || !tsv::parse_int(cols[2], key.sentence_id) ||
        !tsv::parse_int(cols[3], key.position)) {
      r.fail("cluster_id, sentence_id and position must be non-negative integers");
    }
    const auto slot = corpus.word_at(key.occurrence());
    if (!slot || corpus.vocab.word(*slot) != cols[1]) r.fail("row does not match a corpus token");
    if (!seen.insert(key.occurrence().packed()).second) r.fail("occurrence listed twice");
    key.word_id = *slot;
    lc.keys.push_back(key);
    lc.model.assignment.push_back(id);
    max_id = std::max(max_id, id);
  }
  if (lc.keys.empty()) throw data_error(path.string() + ": no clustered occurrences");
  lc.model.k = std::size_t{max_id} + 1;
  std::vector<bool> used(lc.model.k, false);
  for (const auto id : lc.model.assignment) used[id] = true;
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw data_error(path.string() + ": cluster ids are not dense");
  }
  return lc;
}

// --- stages ----------------------------------------------------------------------

Stage parse_stage(std::string_view name) {
  if (name == "ingest") return Stage::ingest;
  if (name == "cluster") return Stage::cluster;
  if (name == "align") return Stage::align;
  if (name == "compose") return Stage::compose;
  if (name == "report") return Stage::report;
  if (name == "pipeline") return Stage::pipeline;
  throw usage_error("unknown stage '" + std::string(name) + "'");
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::cluster: return "cluster";
    case Stage::align: return "align";
    case Stage::compose: return "compose";
    case Stage::report: return "report";
    case Stage::pipeline: return "pipeline";
  }
  return "pipeline";
}

namespace {

std::filesystem::path layer_dir(const PipelineConfig& cfg, std::uint32_t layer) {
  return cfg.out / ("layer_" + std::to_string(layer));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path.string());
  return out;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Json label_list(const std::vector<LabelRef>& labels) {
  Json a = Json::array();
  for (const auto& l : labels) a.push_back(l.str());
  return a;
}

Json config_json(const PipelineConfig& cfg) {
  Json j;
  j["k"] = cfg.k;
  j["theta"] = cfg.theta;
  j["engine"] = std::string(to_string(cfg.engine));
  j["denominator"] = std::string(to_string(cfg.denominator));
  j["max_n"] = cfg.max_n;
  j["mode"] = cfg.mode.str();
  j["min_frequency"] = cfg.filter.min_frequency;
  j["max_occurrences"] = cfg.filter.max_occurrences;
  j["seed"] = cfg.seed;
  return j;
}

Json histogram_json(const CompositionHistogram& h) {
  Json j;
  j["total"] = h.total;
  Json counts, percent, cumulative, cumulative_percent;
  for (std::size_t n = 1; n <= h.max_n; ++n) {
    const auto key = std::to_string(n);
    counts[key] = h.counts[n];
    percent[key] = h.percent(n);
    cumulative[key] = h.cumulative(n);
    cumulative_percent[key] = h.total == 0 ? 0.0 : 100.0 * static_cast<double>(h.cumulative(n)) /
                                                        static_cast<double>(h.total);
  }
  j["counts"] = counts;
  j["percent"] = percent;
  j["cumulative"] = cumulative;
  j["cumulative_percent"] = cumulative_percent;
  j["unexplained"] = h.unexplained;
  j["unexplained_percent"] = h.unexplained_percent();
  return j;
}

void write_histogram_tsv(const std::filesystem::path& path, const CompositionHistogram& h) {
  auto out = open_out(path);
  out << "N\tcount\tpercent\n";
  for (std::size_t n = 1; n <= h.max_n; ++n) out << n << '\t' << h.counts[n] << '\t' << format_double(h.percent(n)) << '\n';
  out << "unexplained\t" << h.unexplained << '\t' << format_double(h.unexplained_percent()) << '\n';
}

std::vector<LayerClusters> run_clustering(const PipelineConfig& cfg, const PipelineInputs& in) {
  return with_stage("cluster", [&] {
    std::vector<LayerClusters> out;
    for (const auto layer : in.layers) {
      const auto slice = in.slice(layer);
      if (cfg.k > slice.rows()) {
        throw usage_error("k = " + std::to_string(cfg.k) + " exceeds the " + std::to_string(slice.rows()) +
                          " occurrences at layer " + std::to_string(layer));
      }
      const auto d = build_dendrogram(slice.view(), cfg.engine);
      check_dendrogram(d);
      LayerClusters lc;
      lc.layer = layer;
      lc.keys = slice.keys;
      lc.model = cut(d, cfg.k, layer);

      const auto dir = layer_dir(cfg, layer);
      {
        auto f = open_out(dir / "dendrogram.tsv");
        write_dendrogram_tsv(f, d);
      }
      {
        auto f = open_out(dir / "clusters.tsv");
        write_clusters_tsv(f, lc, in.corpus);
      }
      if (!cfg.k_diagnostics.empty()) {
        const auto diag = k_diagnostics(slice.view(), d, cfg.k_diagnostics);
        auto f = open_out(dir / "k_diagnostics.tsv");
        f << "k\tdistortion\tsilhouette\n";
        for (std::size_t i = 0; i < diag.k.size(); ++i) {
          f << diag.k[i] << '\t' << format_double(diag.distortion[i]) << '\t' << format_double(diag.silhouette[i])
            << '\n';
        }
      }
      out.push_back(std::move(lc));
    }
    return out;
  });
}

std::vector<LayerClusters> load_clusters(const PipelineConfig& cfg, const PipelineInputs& in) {
  return with_stage("cluster", [&] {
    std::vector<LayerClusters> out;
    for (const auto layer : in.layers) {
      const auto path = layer_dir(cfg, layer) / "clusters.tsv";
      if (!std::filesystem::exists(path)) {
        throw usage_error(path.string() + " not found; run the cluster stage first");
      }
      out.push_back(read_clusters_tsv(path, layer, in.corpus));
    }
    return out;
  });
}

PipelineResult analyze(const PipelineConfig& cfg, const std::vector<ConceptScheme>& schemes,
                       const std::vector<LayerClusters>& layers, bool align, bool compose) {
  PipelineResult res;
  for (const auto& s : schemes) res.schemes.push_back(s.name);
  const Aligner aligner(schemes, {cfg.theta, cfg.denominator});
  std::optional<Composer> composer;
  if (compose) {
    composer.emplace(schemes, CompositionConfig{cfg.theta, cfg.max_n, cfg.mode});
  }
  std::vector<ClusterAlignment> all_alignments;
  std::vector<ClusterComposition> all_compositions;
  std::vector<std::uint32_t> layer_ids;
  for (const auto& lc : layers) {
    LayerAnalysis la;
    la.layer = lc.layer;
    la.members = cluster_members(lc.model, lc.keys);
    if (align) {
      la.alignments = with_stage("align", [&] { return aligner.align_model(lc.layer, la.members); });
      all_alignments.insert(all_alignments.end(), la.alignments.begin(), la.alignments.end());
    }
    if (compose) {
      la.compositions = with_stage("compose", [&] { return compose_model(*composer, lc.layer, la.members); });
      la.histogram = composition_histogram(la.compositions, cfg.max_n);
      all_compositions.insert(all_compositions.end(), la.compositions.begin(), la.compositions.end());
    }
    layer_ids.push_back(lc.layer);
    res.layers.push_back(std::move(la));
  }
  if (align) res.summary = summarize(all_alignments, res.schemes, layer_ids);
  if (compose) res.histogram = composition_histogram(all_compositions, cfg.max_n);
  return res;
}

void write_ingest(const PipelineConfig& cfg, const PipelineInputs& in) {
  auto f = open_out(cfg.out / "occurrences.tsv");
  write_occurrences_tsv(f, in.occurrences(), in.corpus);
  Json j;
  j["records"] = in.dataset.records.size();
  j["kept"] = in.rows.size();
  j["dropped_by_filter"] = in.dropped;
  j["num_layers"] = in.dataset.num_layers;
  j["dim"] = in.dataset.dim;
  j["sentences"] = in.corpus.sentences.size();
  j["tokens"] = in.corpus.token_count();
  j["vocab"] = in.corpus.vocab.size();
  j["layers"] = in.layers;
  j["config"] = config_json(cfg);
  write_json(cfg.out / "ingest.json", j);
}

Json scheme_summary_json(const SchemeSummary& s) {
  Json j;
  j["scheme"] = s.scheme;
  Json curve = Json::array();
  for (const auto& p : s.layer_curve) {
    curve.push_back({{"layer", p.layer}, {"clusters", p.clusters}, {"aligned_count", p.aligned_count},
                     {"normalized_count", p.normalized_count}});
  }
  j["layer_curve"] = curve;
  j["max_layerwise_match"] = s.max_layerwise_match;
  j["network_average"] = s.network_average;
  return j;
}

constexpr const char* kOverallRule = "a cluster counts as aligned when any class of any scheme reaches theta";

void write_alignment(const PipelineConfig& cfg, const std::vector<ConceptScheme>& schemes, const PipelineResult& r) {
  Json j;
  j["config"] = config_json(cfg);
  Json meta;
  meta["overall_rule"] = kOverallRule;
  Json kinds;
  for (const auto& s : schemes) {
    kinds[s.name] = {{"kind", std::string(to_string(s.kind))},
                     {"membership", std::string(to_string(membership_mode(s.kind)))},
                     {"classes", s.classes.size()}};
  }
  meta["schemes"] = kinds;
  j["metadata"] = meta;

  Json per_layer = Json::array();
  for (std::size_t i = 0; i < r.layers.size(); ++i) {
    const auto& la = r.layers[i];
    const auto& lsum = r.summary.overall.per_layer[i];
    Json jl;
    jl["layer"] = la.layer;
    jl["clusters"] = lsum.clusters;
    jl["aligned_clusters"] = lsum.aligned_clusters;
    jl["aligned_fraction"] = lsum.aligned_fraction;
    Json cl = Json::array();
    for (const auto& a : la.alignments) {
      auto scores = a.scores;
      std::stable_sort(scores.begin(), scores.end(),
                       [](const ClassScore& x, const ClassScore& y) { return x.match.score > y.match.score; });
      if (scores.size() > 3) scores.resize(3);
      Json top = Json::array();
      for (const auto& s : scores) {
        top.push_back({{"label", s.label.str()},
                       {"score", s.match.score},
                       {"overlap", s.match.overlap},
                       {"denominator", s.match.denominator}});
      }
      cl.push_back({{"cluster_id", a.cluster_id},
                    {"size", a.size},
                    {"word_types", a.word_types},
                    {"aligned", a.is_aligned},
                    {"aligned_labels", label_list(a.aligned_labels)},
                    {"top_scores", top}});
    }
    jl["clusters_detail"] = cl;
    per_layer.push_back(std::move(jl));
  }
  j["per_layer"] = per_layer;
  Json per_scheme = Json::array();
  for (const auto& s : r.summary.per_scheme) per_scheme.push_back(scheme_summary_json(s));
  j["per_scheme"] = per_scheme;
  j["overall"] = r.summary.overall.overall;
  write_json(cfg.out / "alignment.json", j);

  auto f = open_out(cfg.out / "alignment.tsv");
  f << "layer\tcluster_id\tsize\tword_types\taligned\taligned_labels\tbest_label\tbest_score\n";
  for (const auto& la : r.layers) {
    for (const auto& a : la.alignments) {
      std::string labels;
      for (const auto& l : a.aligned_labels) labels += (labels.empty() ? "" : ",") + l.str();
      const ClassScore* best = nullptr;
      for (const auto& s : a.scores) {
        if (!best || s.match.score > best->match.score) best = &s;
      }
      f << a.layer << '\t' << a.cluster_id << '\t' << a.size << '\t' << a.word_types << '\t'
        << (a.is_aligned ? 1 : 0) << '\t' << (labels.empty() ? "-" : labels) << '\t'
        << (best ? best->label.str() : "-") << '\t' << format_double(best ? best->match.score : 0.0) << '\n';
    }
  }
}

void write_composition(const PipelineConfig& cfg, const std::vector<ConceptScheme>& schemes,
                       const PipelineResult& r) {
  const Composer probe(schemes, {cfg.theta, cfg.max_n, cfg.mode});
  Json j;
  j["config"] = {{"theta", cfg.theta}, {"max_n", cfg.max_n}, {"mode", cfg.mode.str()}};
  j["metadata"] = {{"units", probe.type_units() ? "word_types" : "occurrences"},
                   {"histogram", "counts are minimal N; cumulative counts clusters explained with at most N"}};
  Json per_layer = Json::array();
  for (const auto& la : r.layers) {
    Json jl;
    jl["layer"] = la.layer;
    Json cl = Json::array();
    for (std::size_t c = 0; c < la.compositions.size(); ++c) {
      const auto& comp = la.compositions[c];
      Json jc;
      jc["cluster_id"] = comp.cluster_id;
      jc["size"] = comp.size;
      if (comp.explanation) {
        jc["labels"] = label_list(comp.explanation->labels);
        jc["N"] = comp.explanation->n();
        jc["coverage"] = comp.explanation->coverage;
      } else {
        jc["labels"] = nullptr;
        jc["N"] = nullptr;
        jc["coverage"] = nullptr;
      }
      jc["mode"] = cfg.mode.str();
      if (!la.alignments.empty()) jc["enriched"] = label_list(enrich_aligned(la.alignments[c]));
      cl.push_back(std::move(jc));
    }
    jl["clusters"] = cl;
    jl["histogram"] = histogram_json(la.histogram);
    per_layer.push_back(std::move(jl));
    write_histogram_tsv(layer_dir(cfg, la.layer) / "composition_histogram.tsv", la.histogram);
  }
  j["per_layer"] = per_layer;
  j["histogram"] = histogram_json(r.histogram);
  write_json(cfg.out / "composition.json", j);
  write_histogram_tsv(cfg.out / "composition_histogram.tsv", r.histogram);
}

void write_summary(const PipelineConfig& cfg, const PipelineInputs& in, const std::vector<ConceptScheme>& schemes,
                   const PipelineResult& r) {
  Json j;
  j["config"] = config_json(cfg);
  j["inputs"] = {{"records", in.dataset.records.size()},
                 {"kept", in.rows.size()},
                 {"dropped_by_filter", in.dropped},
                 {"num_layers", in.dataset.num_layers},
                 {"dim", in.dataset.dim},
                 {"layers", in.layers}};
  Json js = Json::array();
  for (const auto& s : schemes) {
    js.push_back({{"name", s.name}, {"kind", std::string(to_string(s.kind))}, {"classes", s.classes.size()}});
  }
  j["schemes"] = js;
  Json layers = Json::array();
  for (std::size_t i = 0; i < r.layers.size(); ++i) {
    const auto& l = r.summary.overall.per_layer[i];
    layers.push_back({{"layer", l.layer},
                      {"clusters", l.clusters},
                      {"aligned_clusters", l.aligned_clusters},
                      {"aligned_fraction", l.aligned_fraction},
                      {"composition", histogram_json(r.layers[i].histogram)}});
  }
  j["per_layer"] = layers;
  Json per_scheme = Json::array();
  for (const auto& s : r.summary.per_scheme) {
    per_scheme.push_back({{"scheme", s.scheme},
                          {"max_layerwise_match", s.max_layerwise_match},
                          {"network_average", s.network_average}});
  }
  j["per_scheme"] = per_scheme;
  j["overall_alignment"] = r.summary.overall.overall;
  j["composition"] = histogram_json(r.histogram);
  j["metadata"] = {{"overall_rule", kOverallRule}};
  write_json(cfg.out / "summary.json", j);
}

}  // namespace

void emit_plot_data(const AlignmentSummary& summary, const std::filesystem::path& dir) {
  for (const auto& s : summary.per_scheme) {
    auto f = open_out(dir / (s.scheme + ".csv"));
    f << "layer,aligned_count,normalized_count\n";
    for (const auto& p : s.layer_curve) {
      f << p.layer << ',' << p.aligned_count << ',' << format_double(p.normalized_count) << '\n';
    }
  }
  auto f = open_out(dir / "overall.csv");
  f << "layer,clusters,aligned_clusters,aligned_fraction\n";
  for (const auto& l : summary.overall.per_layer) {
    f << l.layer << ',' << l.clusters << ',' << l.aligned_clusters << ',' << format_double(l.aligned_fraction) << '\n';
  }
}

std::optional<PipelineResult> run_stage(Stage stage, const PipelineConfig& cfg) {
  with_stage("config", [&] { validate(cfg); });
  const auto in = load_inputs(cfg);
  if (stage == Stage::ingest || stage == Stage::pipeline) with_stage("ingest", [&] { write_ingest(cfg, in); });
  if (stage == Stage::ingest) return std::nullopt;

  std::vector<LayerClusters> clusters;
  if (stage == Stage::cluster || stage == Stage::pipeline) {
    clusters = run_clustering(cfg, in);
    if (stage == Stage::cluster) return std::nullopt;
  } else {
    clusters = load_clusters(cfg, in);
  }

  const auto schemes = build_schemes(cfg, in.corpus, in.occurrences());
  const bool align = stage != Stage::compose;
  const bool compose = stage != Stage::align;
  auto result = analyze(cfg, schemes, clusters, align, compose);
  with_stage("report", [&] {
    if (align) write_alignment(cfg, schemes, result);
    if (compose) write_composition(cfg, schemes, result);
    if (stage == Stage::report || stage == Stage::pipeline) {
      write_summary(cfg, in, schemes, result);
      emit_plot_data(result.summary, cfg.out / "plots");
    }
  });
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) { return *run_stage(Stage::pipeline, cfg); }

}  // namespace latentc
