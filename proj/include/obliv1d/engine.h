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


#pragma once

#include <string>
#include <vector>

#include "obliv1d/protocols.h"
#include "obliv1d/qnn.h"
#include "obliv1d/runtime.h"

namespace obliv1d {

// Who learns the class labels.
enum class RevealKind { kAlice, kBob, kThirdParty };

struct RevealPolicy {
  RevealKind kind = RevealKind::kAlice;
  // host:port of the third-party receiver; informational in simulation.
  std::string address;
};

// "alice", "bob" or "third-party:<addr>".
RevealPolicy ParseRevealPolicy(const std::string& s);
std::string RevealPolicyName(const RevealPolicy& r);
int RevealNode(SchemeCode code, const RevealPolicy& r);

struct InferenceRequest {
  TruncMode trunc = TruncMode::kDeterministic;
  RevealPolicy reveal;
  // Set on Bob's node only.
  const QuantizedModel* model = nullptr;
  // Set on Alice's node only; uint8 feature vectors.
  const std::vector<std::vector<int64_t>>* inputs = nullptr;
};

struct InferenceResult {
  // Filled on the reveal target only.
  std::vector<int> labels;
  // The public architecture as received (compute nodes, Bob, target).
  QuantizedModel arch;
  size_t batch = 0;
};

// One node's part of a private inference session. Bob sends the public
// architecture and Alice the batch shape to the compute nodes, which agree
// on both (active schemes), share Bob's parameters and Alice's inputs, run
// the network and deliver the labels to the reveal target.
InferenceResult RunInference(Party& p, const InferenceRequest& req);

// Simulates a whole session in-process and returns Alice's, Bob's or the
// third party's labels, depending on the policy. Throws the root-cause
// error of a failed run.
struct LocalInferenceOutput {
  std::vector<int> labels;
  std::vector<NodeResult> nodes;
};
LocalInferenceOutput RunLocalInference(const Ring& ring, SchemeCode code,
                                       const SimOptions& opts, const QuantizedModel& model,
                                       const std::vector<std::vector<int64_t>>& inputs,
                                       TruncMode trunc, const RevealPolicy& reveal);

// Copy of an architecture with zero weights and unit scales; drives a
// session whose preprocessing consumption depends on shapes only.
QuantizedModel PlaceholderModel(const QuantizedModel& arch);

// Exact amounts a session of this shape draws from dealer files.
PreprocCounts MeasurePreprocessing(const Ring& ring, SchemeCode code,
                                   const QuantizedModel& arch, size_t batch,
                                   TruncMode trunc, const RevealPolicy& reveal);

// Rethrows the error recorded in a failed NodeResult as the matching
// exception type.
[[noreturn]] void RethrowNodeError(const NodeResult& r);

}  // namespace obliv1d
