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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "latentc/clustering.hpp"
#include "latentc/composition.hpp"
#include "latentc/embedding_store.hpp"
#include "latentc/errors.hpp"
#include "latentc/pipeline.hpp"
#include "latentc/synth.hpp"

namespace py = pybind11;
using namespace latentc;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

MatrixView as_matrix(const FloatArray& points) {
  if (points.ndim() != 2) throw usage_error("points must be a 2-D array");
  const auto rows = static_cast<std::size_t>(points.shape(0));
  const auto cols = static_cast<std::size_t>(points.shape(1));
  return {std::span<const float>(points.data(), rows * cols), rows, cols};
}

py::dict read_ecx(const std::filesystem::path& path) {
  const auto ds = read_dataset(path);
  const auto n = static_cast<py::ssize_t>(ds.records.size());
  py::array_t<std::uint32_t> records({n, py::ssize_t{3}});
  auto r = records.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i) {
    r(i, 0) = ds.records[i].word_id;
    r(i, 1) = ds.records[i].sentence_id;
    r(i, 2) = ds.records[i].position;
  }
  py::array_t<float> payload({n, static_cast<py::ssize_t>(ds.num_layers), static_cast<py::ssize_t>(ds.dim)});
  if (!ds.payload.empty()) std::memcpy(payload.mutable_data(), ds.payload.data(), ds.payload.size() * sizeof(float));
  py::dict out;
  out["num_layers"] = ds.num_layers;
  out["dim"] = ds.dim;
  out["vocab"] = ds.vocab;
  out["records"] = records;
  out["payload"] = payload;
  return out;
}

void write_ecx(const std::filesystem::path& path, const std::vector<std::string>& vocab,
               const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& records,
               const FloatArray& payload) {
  if (records.ndim() != 2 || records.shape(1) != 3) throw usage_error("records must have shape (N, 3)");
  if (payload.ndim() != 3 || payload.shape(0) != records.shape(0)) {
    throw usage_error("payload must have shape (N, layers, dim)");
  }
  EmbeddingDataset ds;
  ds.num_layers = static_cast<std::uint32_t>(payload.shape(1));
  ds.dim = static_cast<std::uint32_t>(payload.shape(2));
  ds.vocab = vocab;
  const auto r = records.unchecked<2>();
  const auto per = ds.record_floats();
  for (py::ssize_t i = 0; i < records.shape(0); ++i) {
    ds.add_record({r(i, 0), r(i, 1), r(i, 2)}, std::span<const float>(payload.data() + i * per, per));
  }
  write_dataset(ds, path);
}

py::array_t<std::uint32_t> labels_array(const std::vector<std::uint32_t>& v) {
  py::array_t<std::uint32_t> out(static_cast<py::ssize_t>(v.size()));
  if (!v.empty()) std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(std::uint32_t));
  return out;
}

py::dict result_dict(const PipelineResult& r) {
  py::list layers;
  for (std::size_t i = 0; i < r.layers.size(); ++i) {
    const auto& l = r.summary.overall.per_layer.at(i);
    py::dict d;
    d["layer"] = l.layer;
    d["clusters"] = l.clusters;
    d["aligned_clusters"] = l.aligned_clusters;
    d["aligned_fraction"] = l.aligned_fraction;
    d["composition"] = r.layers[i].histogram.counts;
    d["unexplained"] = r.layers[i].histogram.unexplained;
    layers.append(d);
  }
  py::dict out;
  out["schemes"] = r.schemes;
  out["layers"] = layers;
  out["overall_alignment"] = r.summary.overall.overall;
  out["composition"] = r.histogram.counts;
  out["unexplained"] = r.histogram.unexplained;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "latent concept analysis: Ward clustering, alignment, composition";

  // module-lifetime references; the translator outlives this scope
  const py::exception<Error> base(m, "LatentcError", PyExc_RuntimeError);
  static const py::handle usage = py::exception<Error>(m, "UsageError", base.ptr()).release();
  static const py::handle data = py::exception<Error>(m, "DataError", base.ptr()).release();
  static const py::handle invariant = py::exception<Error>(m, "InvariantError", base.ptr()).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::usage: py::set_error(usage, e.what()); break;
        case ErrorKind::data: py::set_error(data, e.what()); break;
        case ErrorKind::invariant: py::set_error(invariant, e.what()); break;
      }
    }
  });

  py::class_<Dendrogram>(m, "Dendrogram")
      .def_readonly("num_leaves", &Dendrogram::num_leaves)
      .def_property_readonly("merges",
                             [](const Dendrogram& d) {
                               py::list out;
                               for (const auto& x : d.merges) out.append(py::make_tuple(x.left, x.right, x.height, x.size));
                               return out;
                             })
      .def_property_readonly("heights",
                             [](const Dendrogram& d) {
                               py::array_t<double> h(static_cast<py::ssize_t>(d.merges.size()));
                               auto w = h.mutable_unchecked<1>();
                               for (std::size_t i = 0; i < d.merges.size(); ++i) w(i) = d.merges[i].height;
                               return h;
                             })
      .def("cut", [](const Dendrogram& d, std::size_t k) { return labels_array(cut(d, k).assignment); }, py::arg("k"),
           "Flat labels for K clusters, ordered by each cluster's smallest row.");

  m.def(
      "ward",
      [](const FloatArray& points, const std::string& engine) {
        const auto view = as_matrix(points);
        const auto e = parse_engine(engine);
        py::gil_scoped_release release;
        return build_dendrogram(view, e);
      },
      py::arg("points"), py::arg("engine") = "nnchain",
      "Ward dendrogram; heights are squared Euclidean Lance-Williams distances.");
  m.def(
      "adjusted_rand_index",
      [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) { return adjusted_rand_index(a, b); },
      py::arg("a"), py::arg("b"));
  m.def("read_ecx", &read_ecx, py::arg("path"));
  m.def("write_ecx", &write_ecx, py::arg("path"), py::arg("vocab"), py::arg("records"), py::arg("payload"));
  m.def("required_cover", &required_cover, py::arg("units"), py::arg("theta"));

  m.def(
      "synth",
      [](const std::filesystem::path& out, const std::string& preset, std::uint64_t seed) {
        SynthSpec spec;
        if (preset == "mixed20") {
          spec = preset_mixed20(seed);
        } else if (preset == "pure4") {
          spec = preset_pure4(seed);
        } else {
          throw usage_error("unknown preset '" + preset + "'");
        }
        const auto o = generate_synthetic(spec, out);
        py::dict d;
        d["corpus"] = o.corpus;
        d["embeddings"] = o.embeddings;
        d["truth"] = o.truth;
        d["config"] = o.config;
        d["annotations"] = o.annotations;
        return d;
      },
      py::arg("out"), py::arg("preset") = "mixed20", py::arg("seed") = 0);

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config, const std::filesystem::path& out, py::kwargs overrides) {
        auto cfg = pipeline_config(load_config(config));
        cfg.out = out;
        for (const auto& [key, value] : overrides) {
          const auto k = py::str(key).cast<std::string>();
          if (k == "k") {
            cfg.k = value.cast<std::size_t>();
          } else if (k == "theta") {
            cfg.theta = value.cast<double>();
          } else if (k == "max_n") {
            cfg.max_n = value.cast<std::size_t>();
          } else if (k == "mode") {
            cfg.mode = parse_composition_mode(value.cast<std::string>());
          } else if (k == "engine") {
            cfg.engine = parse_engine(value.cast<std::string>());
          } else if (k == "layers") {
            cfg.layers = value.cast<std::vector<std::uint32_t>>();
          } else if (k == "seed") {
            cfg.seed = cfg.filter.seed = value.cast<std::uint64_t>();
          } else {
            throw usage_error("unknown override '" + k + "'");
          }
        }
        validate(cfg);
        PipelineResult r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(cfg);
        }
        return result_dict(r);
      },
      py::arg("config"), py::arg("out"),
      "Runs every stage; keyword overrides: k, theta, max_n, mode, engine, layers, seed.");
}
