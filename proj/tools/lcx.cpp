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

// lcx: command-line front end.
//
//   lcx synth    --out DIR [--preset mixed20|pure4 | --config SPEC] [--seed S]
//   lcx ingest   --config FILE [--out DIR] [...]
//   lcx cluster | align | compose | report | pipeline  (same flags)
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 internal invariant.

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "latentc/errors.hpp"
#include "latentc/pipeline.hpp"
#include "latentc/synth.hpp"

namespace {

using namespace latentc;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::invariant: return 4;
  }
  return 4;
}

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> theta;
  std::optional<std::string> layers;
  std::optional<std::string> engine;
  std::optional<std::size_t> max_n;
  std::optional<std::string> mode;
};

void add_pipeline_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "pipeline config file")->required();
  cmd->add_option("--out", o.out, "output directory (overrides `out`)");
  cmd->add_option("--seed", o.seed, "sampling seed");
  cmd->add_option("--k", o.k, "clusters per layer (default 1000)");
  cmd->add_option("--theta", o.theta, "alignment threshold (default 0.9)");
  cmd->add_option("--layers", o.layers, "layer list, e.g. 0,2,5-7 or all");
  cmd->add_option("--engine", o.engine, "nnchain|naive");
  cmd->add_option("--max-n", o.max_n, "largest composition size (default 6)");
  cmd->add_option("--mode", o.mode, "within:<scheme>|cross");
}

PipelineConfig resolve_config(const Overrides& o) {
  return with_stage("config", [&] {
    auto cfg = pipeline_config(load_config(o.config));
    if (!o.out.empty()) cfg.out = o.out;
    if (o.seed) cfg.seed = cfg.filter.seed = *o.seed;
    if (o.k) cfg.k = *o.k;
    if (o.theta) cfg.theta = *o.theta;
    if (o.layers) cfg.layers = *o.layers == "all" ? std::vector<std::uint32_t>{} : parse_layer_list(*o.layers);
    if (o.engine) cfg.engine = parse_engine(*o.engine);
    if (o.max_n) cfg.max_n = *o.max_n;
    if (o.mode) cfg.mode = parse_composition_mode(*o.mode);
    validate(cfg);
    return cfg;
  });
}

void print_result(Stage stage, const PipelineConfig& cfg, const std::optional<PipelineResult>& r) {
  std::cout << "lcx " << to_string(stage) << ": wrote " << cfg.out.string() << '\n';
  if (!r) return;
  if (!r->summary.overall.per_layer.empty()) {
    for (const auto& l : r->summary.overall.per_layer) {
      std::cout << "  layer " << l.layer << ": " << l.aligned_clusters << "/" << l.clusters << " aligned ("
                << format_double(l.aligned_fraction) << ")\n";
    }
    std::cout << "  overall alignment " << format_double(r->summary.overall.overall) << '\n';
  }
  if (r->histogram.total > 0) {
    std::cout << "  composition:";
    for (std::size_t n = 1; n <= r->histogram.max_n; ++n) std::cout << " N=" << n << ":" << r->histogram.counts[n];
    std::cout << " unexplained:" << r->histogram.unexplained << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent concept analysis toolkit"};
  app.require_subcommand(1);

  std::string synth_out, synth_spec, preset = "mixed20";
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--config", synth_spec, "synthetic spec file");
  synth->add_option("--preset", preset, "mixed20|pure4 (ignored with --config)");
  synth->add_option("--seed", synth_seed, "generator seed");

  Overrides overrides;
  std::string stage_name;
  for (const char* name : {"ingest", "cluster", "align", "compose", "report", "pipeline"}) {
    auto* cmd = app.add_subcommand(name);
    add_pipeline_flags(cmd, overrides);
    cmd->callback([&stage_name, name] { stage_name = name; });
  }
  app.get_subcommand("ingest")->description("load corpus and embeddings, apply the frequency filter");
  app.get_subcommand("cluster")->description("Ward clustering per layer");
  app.get_subcommand("align")->description("theta-alignment of clusters to concept schemes");
  app.get_subcommand("compose")->description("minimal label compositions for clusters");
  app.get_subcommand("report")->description("alignment, composition, summary and plot data");
  app.get_subcommand("pipeline")->description("every stage in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lcx: usage: " << e.what() << '\n';
    return 2;
  }

  const std::string current = synth->parsed() ? "synth" : stage_name;
  try {
    if (synth->parsed()) {
      SynthSpec spec;
      if (!synth_spec.empty()) {
        spec = with_stage("config", [&] { return parse_synth_spec(load_config(synth_spec)); });
      } else if (preset == "mixed20") {
        spec = preset_mixed20();
      } else if (preset == "pure4") {
        spec = preset_pure4();
      } else {
        throw usage_error("unknown preset '" + preset + "' (mixed20, pure4)");
      }
      if (synth_seed) spec.seed = *synth_seed;
      const auto out = with_stage("synth", [&] { return generate_synthetic(spec, synth_out); });
      std::cout << "lcx synth: wrote " << synth_out << " (" << spec.clusters.size() << " clusters, " << spec.layers
                << " layers)\n";
      std::cout << "  run: lcx pipeline --config " << out.config.string() << " --out <dir>\n";
      return 0;
    }
    const auto stage = parse_stage(stage_name);
    const auto cfg = resolve_config(overrides);
    const auto result = with_stage(stage_name.c_str(), [&] { return run_stage(stage, cfg); });
    print_result(stage, cfg, result);
    return 0;
  } catch (const Error& e) {
    std::cerr << "lcx: " << (e.stage().empty() ? current + ": " : "") << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "lcx: " << current << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "lcx: " << current << ": internal error: " << e.what() << '\n';
    return 4;
  }
}
