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


#include "obliv1d/engine.h"

#include <mutex>

#include "obliv1d/errors.h"
#include "obliv1d/model_io.h"
#include "obliv1d/secure_qnn.h"

namespace obliv1d {
namespace {

std::vector<uint8_t> ToBytes(const std::string& s) { return {s.begin(), s.end()}; }
std::string FromBytes(const std::vector<uint8_t>& b) { return {b.begin(), b.end()}; }

std::string BatchHeader(size_t batch, size_t length) {
  return "batch=" + std::to_string(batch) + " length=" + std::to_string(length);
}

void ParseBatchHeader(const std::string& s, size_t* batch, size_t* length) {
  unsigned long long b = 0, l = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "batch=%llu length=%llu%c", &b, &l, &tail) != 2 || b == 0 ||
      b > (1u << 24) || l > (1u << 20)) {
    throw ProtocolError("malformed batch header from Alice");
  }
  *batch = b;
  *length = l;
}

// Shape message from compute node 0 to a non-compute reveal target.
std::string ShapeMessage(size_t batch, const std::string& arch_text) {
  return std::to_string(batch) + "\n" + arch_text;
}

void ParseShapeMessage(const std::string& s, size_t* batch, QuantizedModel* arch) {
  const size_t nl = s.find('\n');
  if (nl == std::string::npos) throw ProtocolError("malformed shape message");
  try {
    *batch = std::stoull(s.substr(0, nl));
  } catch (const std::exception&) {
    throw ProtocolError("malformed shape message");
  }
  *arch = ParseModel(s.substr(nl + 1));
}

}  // namespace

RevealPolicy ParseRevealPolicy(const std::string& s) {
  if (s == "alice") return {RevealKind::kAlice, ""};
  if (s == "bob") return {RevealKind::kBob, ""};
  const std::string prefix = "third-party:";
  if (s.rfind(prefix, 0) == 0 && s.size() > prefix.size()) {
    return {RevealKind::kThirdParty, s.substr(prefix.size())};
  }
  throw UsageError("--reveal-to must be alice, bob or third-party:<addr>, got '" + s + "'");
}

std::string RevealPolicyName(const RevealPolicy& r) {
  switch (r.kind) {
    case RevealKind::kAlice:
      return "alice";
    case RevealKind::kBob:
      return "bob";
    case RevealKind::kThirdParty:
      return "third-party:" + r.address;
  }
  return "?";
}

int RevealNode(SchemeCode code, const RevealPolicy& r) {
  const SchemeInfo info = Describe(code);
  switch (r.kind) {
    case RevealKind::kAlice:
      return info.alice();
    case RevealKind::kBob:
      return info.bob();
    case RevealKind::kThirdParty:
      return info.third_party();
  }
  return info.alice();
}

InferenceResult RunInference(Party& p, const InferenceRequest& req) {
  const SchemeInfo& info = p.info();
  const Ring& r = p.ring();
  const int self = p.node();
  const int alice = info.alice(), bob = info.bob();
  const int target = RevealNode(info.code, req.reveal);
  const auto computes = info.compute_nodes();
  InferenceResult res;

  std::string arch_text;
  if (self == bob) {
    if (!req.model) throw UsageError("Bob needs a model");
    if (!req.model->has_params) throw UsageError("Bob's model has no parameters");
    ValidateModel(*req.model);
    res.arch = Architecture(*req.model);
    arch_text = SerializeModel(res.arch);
    for (int c : computes) {
      if (c != self) p.net().SendBytes(c, MsgType::kText, ToBytes(arch_text));
    }
  }
  Vec values;
  if (self == alice) {
    if (!req.inputs || req.inputs->empty()) throw UsageError("Alice needs at least one input");
    const size_t len = req.inputs->front().size();
    for (const auto& v : *req.inputs) {
      if (v.size() != len) throw ValidationError("Alice's inputs differ in length");
      for (int64_t x : v) {
        if (x < 0 || x > 255) throw ValidationError("input value outside [0, 255]");
        values.push_back(static_cast<u128>(x));
      }
    }
    res.batch = req.inputs->size();
    const std::string header = BatchHeader(res.batch, len);
    for (int c : computes) {
      if (c != self) p.net().SendBytes(c, MsgType::kText, ToBytes(header));
    }
  }

  if (p.is_compute()) {
    if (self != bob) {
      arch_text = FromBytes(p.net().RecvBytes(bob, MsgType::kText));
      res.arch = ParseModel(arch_text);
      if (res.arch.has_params) throw ProtocolError("Bob sent parameters in the clear");
    }
    size_t length = 0;
    if (self == alice) {
      length = req.inputs->front().size();
    } else {
      ParseBatchHeader(FromBytes(p.net().RecvBytes(alice, MsgType::kText)), &res.batch,
                       &length);
    }
    if (info.active) {
      const std::string all = arch_text + "\n" + BatchHeader(res.batch, length);
      AgreeOnBytes(p, ToBytes(all), "session shape");
    }
    if (static_cast<int>(length) != res.arch.input_length) {
      throw ValidationError("input has " + std::to_string(length) +
                            " values, model expects " +
                            std::to_string(res.arch.input_length));
    }
    if (self == computes.front() && !info.is_compute(target)) {
      p.net().SendBytes(target, MsgType::kText, ToBytes(ShapeMessage(res.batch, arch_text)));
    }
  } else if (self == target) {
    QuantizedModel arch;
    ParseShapeMessage(FromBytes(p.net().RecvBytes(computes.front(), MsgType::kText)),
                      &res.batch, &arch);
    if (self != bob) res.arch = std::move(arch);
  }

  SharedModel sm;
  if (p.is_compute() || self == bob) {
    sm = ShareModel(p, res.arch, bob, self == bob ? req.model : nullptr);
  }
  ShareVec x;
  if (p.is_compute() || self == alice) {
    const size_t n = self == alice ? values.size()
                                   : res.batch * static_cast<size_t>(res.arch.input_length);
    x = InputFrom(p, alice, n, self == alice ? &values : nullptr);
  }
  ShareVec labels;
  if (p.is_compute()) {
    SecureInferOptions opts;
    opts.trunc = req.trunc;
    labels = SecureInfer(p, sm, x, res.batch, opts);
  }
  if (p.is_compute() || self == target) {
    Vec out = RevealTo(p, target, labels, res.batch);
    if (self == target) {
      for (u128 v : out) res.labels.push_back(static_cast<int>(r.ToSigned(v)));
    }
  }
  return res;
}

[[noreturn]] void RethrowNodeError(const NodeResult& nr) {
  const std::string msg = "node " + std::to_string(nr.node) + ": " + nr.message;
  switch (nr.error) {
    case ErrorKind::kUsage:
      throw UsageError(msg);
    case ErrorKind::kRange:
      throw RangeError(msg);
    case ErrorKind::kProtocol:
      throw ProtocolError(msg);
    case ErrorKind::kTransport:
      throw TransportError(msg);
    case ErrorKind::kAbort:
      throw AbortError(msg);
    case ErrorKind::kBudget:
      throw BudgetError(msg);
    case ErrorKind::kValidation:
      throw ValidationError(msg);
    default:
      throw std::runtime_error(msg);
  }
}

LocalInferenceOutput RunLocalInference(const Ring& ring, SchemeCode code,
                                       const SimOptions& opts, const QuantizedModel& model,
                                       const std::vector<std::vector<int64_t>>& inputs,
                                       TruncMode trunc, const RevealPolicy& reveal) {
  CheckSupported(code, ring);
  const SchemeInfo info = Describe(code);
  const int target = RevealNode(code, reveal);
  LocalInferenceOutput out;
  std::mutex mu;
  out.nodes = RunLocal(ring, code, opts, [&](Party& p) {
    InferenceRequest req;
    req.trunc = trunc;
    req.reveal = reveal;
    if (p.node() == info.bob()) req.model = &model;
    if (p.node() == info.alice()) req.inputs = &inputs;
    InferenceResult res = RunInference(p, req);
    if (p.node() == target) {
      std::lock_guard<std::mutex> lock(mu);
      out.labels = std::move(res.labels);
    }
  });
  if (const NodeResult* f = FirstFailure(out.nodes)) RethrowNodeError(*f);
  return out;
}

QuantizedModel PlaceholderModel(const QuantizedModel& arch) {
  QuantizedModel m = arch;
  m.has_params = true;
  for (Layer& l : m.layers) {
    auto fill = [](auto& layer, size_t weights, size_t units) {
      layer.weights.assign(weights, 0);
      layer.bias.assign(units, 0);
      layer.weight_qp = {};
      layer.out_qp = {};
      layer.rq = {};
    };
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      fill(*c, static_cast<size_t>(c->filters) * c->depth * c->width, c->filters);
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      fill(*d, static_cast<size_t>(d->inputs) * d->outputs, d->outputs);
    }
  }
  ValidateModel(m);
  return m;
}

PreprocCounts MeasurePreprocessing(const Ring& ring, SchemeCode code,
                                   const QuantizedModel& arch, size_t batch,
                                   TruncMode trunc, const RevealPolicy& reveal) {
  const QuantizedModel model = PlaceholderModel(arch);
  const std::vector<std::vector<int64_t>> inputs(batch,
                                                 std::vector<int64_t>(arch.input_length, 0));
  std::mutex mu;
  std::map<int, RecordingSource*> sources;
  SimOptions opts;
  opts.seed = KeyFromSeed(0);
  opts.source = [&](int node) {
    auto src = std::make_unique<RecordingSource>(ring, code, node, opts.seed);
    std::lock_guard<std::mutex> lock(mu);
    sources[node] = src.get();
    return src;
  };
  PreprocCounts counts;
  const SchemeInfo info = Describe(code);
  // Sources die with their threads, so the counts are copied inside the run.
  std::vector<NodeResult> nodes = RunLocal(ring, code, opts, [&](Party& p) {
    InferenceRequest req;
    req.trunc = trunc;
    req.reveal = reveal;
    if (p.node() == info.bob()) req.model = &model;
    if (p.node() == info.alice()) req.inputs = &inputs;
    RunInference(p, req);
    if (p.node() == 0) {
      std::lock_guard<std::mutex> lock(mu);
      counts = sources[0]->counts();
    }
  });
  if (const NodeResult* f = FirstFailure(nodes)) RethrowNodeError(*f);
  return counts;
}

}  // namespace obliv1d
