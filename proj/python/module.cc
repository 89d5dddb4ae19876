// Copyright 2026 The Obliv1D Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings: model files, the plaintext oracle and local secure
// inference.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "obliv1d/crypto.h"
#include "obliv1d/engine.h"
#include "obliv1d/errors.h"
#include "obliv1d/model_io.h"
#include "obliv1d/qnn.h"

namespace py = pybind11;

namespace obliv1d {
namespace {

std::vector<std::string> LayerKinds(const QuantizedModel& m) {
  std::vector<std::string> kinds;
  for (const Layer& l : m.layers) kinds.emplace_back(LayerKindName(l));
  return kinds;
}

py::dict SecureInferPy(const QuantizedModel& model,
                       const std::vector<std::vector<int64_t>>& inputs,
                       const std::string& scheme, const std::string& ring,
                       const std::string& trunc, const std::string& reveal_to, uint64_t seed) {
  const Ring r = ParseRing(ring);
  const SchemeCode code = ParseSchemeCode(scheme);
  if (trunc != "det" && trunc != "prob") throw UsageError("trunc must be 'det' or 'prob'");
  SimOptions opts;
  opts.seed = KeyFromSeed(seed);
  LocalInferenceOutput out;
  {
    py::gil_scoped_release release;
    out = RunLocalInference(r, code, opts, model, inputs,
                            trunc == "det" ? TruncMode::kDeterministic
                                           : TruncMode::kProbabilistic,
                            ParseRevealPolicy(reveal_to));
  }
  uint64_t rounds = 0, bytes = 0;
  for (const NodeResult& n : out.nodes) {
    rounds = std::max(rounds, n.rounds);
    bytes += n.bytes_sent;
  }
  py::dict d;
  d["labels"] = out.labels;
  d["rounds"] = rounds;
  d["bytes"] = bytes;
  return d;
}

PYBIND11_MODULE(_core, m) {
  m.doc() = "Private 1-D CNN inference engine";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<AbortError>(m, "AbortError", PyExc_RuntimeError);

  py::class_<QuantizedModel>(m, "Model")
      .def_readonly("name", &QuantizedModel::name)
      .def_readonly("version", &QuantizedModel::version)
      .def_readonly("input_length", &QuantizedModel::input_length)
      .def_readonly("labels", &QuantizedModel::labels)
      .def_readonly("has_params", &QuantizedModel::has_params)
      .def_property_readonly("input_scale", [](const QuantizedModel& q) { return q.input_qp.scale; })
      .def_property_readonly("input_zero_point",
                             [](const QuantizedModel& q) { return q.input_qp.zero_point; })
      .def_property_readonly("layer_kinds", &LayerKinds)
      .def_property_readonly("num_classes", &NumClasses)
      .def_property_readonly("checksum", &ModelChecksum)
      .def("architecture", &Architecture)
      .def("serialize", &SerializeModel)
      .def("save", [](const QuantizedModel& q, const std::string& path) { WriteModel(path, q); })
      .def("__eq__", [](const QuantizedModel& a, const QuantizedModel& b) { return a == b; })
      .def("__repr__", [](const QuantizedModel& q) {
        return "<Model " + q.name + " input_length=" + std::to_string(q.input_length) +
               " layers=" + std::to_string(q.layers.size()) + ">";
      });

  m.def("load_model", &LoadModel, py::arg("path"));
  m.def("parse_model", &ParseModel, py::arg("text"));
  m.def("gen_model", &GenRandomModel, py::arg("shape"), py::arg("seed"),
        py::arg("input_length") = 40);
  m.def("gen_inputs", &GenRandomInputs, py::arg("model"), py::arg("count"), py::arg("seed"));
  m.def(
      "load_input",
      [](const std::string& path, const QuantizedModel* model) {
        return LoadInput(path, model).values;
      },
      py::arg("path"), py::arg("model") = nullptr);
  m.def(
      "load_test_vectors",
      [](const std::string& path, const QuantizedModel& model) {
        py::list cases;
        for (const TestCase& c : LoadTestVectors(path, model).cases) {
          py::dict d;
          d["label"] = c.label;
          d["input"] = c.input;
          d["layers"] = c.layers;
          cases.append(d);
        }
        return cases;
      },
      py::arg("path"), py::arg("model"));

  m.def(
      "requant_from_multiplier",
      [](double multiplier) {
        const Requant rq = RequantFromMultiplier(multiplier);
        return py::make_tuple(rq.m0, rq.shift);
      },
      py::arg("multiplier"), "Returns (m0, shift) with M ~= m0 * 2^-(31 + shift).");

  m.def(
      "infer_plain",
      [](const QuantizedModel& model, const std::vector<int64_t>& input) {
        const PlainTrace t = InferPlain(model, input);
        return py::make_tuple(t.label, t.layers);
      },
      py::arg("model"), py::arg("input"),
      "Integer reference inference. Returns (label, per-layer outputs).");

  m.def("secure_infer", &SecureInferPy, py::arg("model"), py::arg("inputs"),
        py::arg("scheme") = "semi-2pc", py::arg("ring") = "prime64", py::arg("trunc") = "det",
        py::arg("reveal_to") = "alice", py::arg("seed") = 1,
        "Runs one in-process secure session over a batch of inputs.");
}

}  // namespace
}  // namespace obliv1d
