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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "obliv1d/dealer.h"
#include "obliv1d/protocols.h"

namespace obliv1d {

enum class ErrorKind {
  kNone,
  kUsage,
  kRange,
  kProtocol,
  kTransport,
  kAbort,
  kBudget,
  kValidation,
  kOther,
};

const char* ErrorKindName(ErrorKind k);
// Classifies the exception currently being handled.
ErrorKind ClassifyCurrentException(std::string* message);

// Peers of `node` in a session: compute nodes talk to everyone, clients
// only to compute nodes. The result includes `node`.
std::vector<int> SessionNodes(SchemeCode code, int node);
uint64_t SessionIdFromSeed(const Key& seed);

struct NodeResult {
  int node = 0;
  ErrorKind error = ErrorKind::kNone;
  std::string message;
  uint64_t rounds = 0;
  uint64_t bytes_sent = 0;
  Consumption consumed;
  Digest transcript{};
  bool ok() const { return error == ErrorKind::kNone; }
};

struct SimOptions {
  Key seed{};
  PartyOptions party;
  DealerOptions dealer;
  // Nodes to run; empty means every node of the scheme. Links to nodes
  // outside this set are not created.
  std::vector<int> nodes;
  // Preprocessing for each node; a DealerSource on `seed` when unset.
  std::function<std::unique_ptr<Preprocessing>(int node)> source;
  // Called on each party before `fn`, e.g. to install a tamper hook.
  std::function<void(Party&)> setup;
};

// Runs `fn` on one thread per node over an in-process hub, each node with
// its own DealerSource. A node that throws shuts the hub down so the rest
// unblock. Results are ordered by node id.
std::vector<NodeResult> RunLocal(const Ring& ring, SchemeCode code,
                                 const SimOptions& opts,
                                 const std::function<void(Party&)>& fn);

// The root-cause failure of a run: the first non-transport error, else the
// first error, else nullptr.
const NodeResult* FirstFailure(const std::vector<NodeResult>& results);

}  // namespace obliv1d
