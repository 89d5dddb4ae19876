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

#include "obliv1d/runtime.h"

#include <algorithm>
#include <cstring>
#include <thread>

namespace obliv1d {

const char* ErrorKindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::kNone:
      return "ok";
    case ErrorKind::kUsage:
      return "usage";
    case ErrorKind::kRange:
      return "range";
    case ErrorKind::kProtocol:
      return "protocol";
    case ErrorKind::kTransport:
      return "transport";
    case ErrorKind::kAbort:
      return "abort";
    case ErrorKind::kBudget:
      return "budget";
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kOther:
      return "other";
  }
  return "?";
}

ErrorKind ClassifyCurrentException(std::string* message) {
  auto set = [&](const std::exception& e, ErrorKind k) {
    if (message) *message = e.what();
    return k;
  };
  try {
    throw;
  } catch (const UsageError& e) {
    return set(e, ErrorKind::kUsage);
  } catch (const DescriptorMismatch& e) {
    return set(e, ErrorKind::kProtocol);
  } catch (const RangeError& e) {
    return set(e, ErrorKind::kRange);
  } catch (const ProtocolError& e) {
    return set(e, ErrorKind::kProtocol);
  } catch (const TransportError& e) {
    return set(e, ErrorKind::kTransport);
  } catch (const AbortError& e) {
    return set(e, ErrorKind::kAbort);
  } catch (const BudgetError& e) {
    return set(e, ErrorKind::kBudget);
  } catch (const ValidationError& e) {
    return set(e, ErrorKind::kValidation);
  } catch (const std::exception& e) {
    return set(e, ErrorKind::kOther);
  } catch (...) {
    if (message) *message = "unknown exception";
    return ErrorKind::kOther;
  }
}

std::vector<int> SessionNodes(SchemeCode code, int node) {
  SchemeInfo info = Describe(code);
  if (info.is_compute(node)) return info.all_nodes();
  std::vector<int> nodes = info.compute_nodes();
  nodes.push_back(node);
  return nodes;
}

uint64_t SessionIdFromSeed(const Key& seed) {
  Key k = DeriveKey(seed, "session-id");
  uint64_t id;
  std::memcpy(&id, k.data(), sizeof(id));
  return id;
}

std::vector<NodeResult> RunLocal(const Ring& ring, SchemeCode code,
                                 const SimOptions& opts,
                                 const std::function<void(Party&)>& fn) {
  SchemeInfo info = Describe(code);
  std::vector<int> nodes = opts.nodes.empty() ? info.all_nodes() : opts.nodes;
  SimulatedHub hub(info.all_nodes());
  std::vector<NodeResult> results(nodes.size());
  std::vector<std::thread> threads;
  const uint64_t session = SessionIdFromSeed(opts.seed);
  for (size_t t = 0; t < nodes.size(); ++t) {
    threads.emplace_back([&, t] {
      NodeResult& res = results[t];
      res.node = nodes[t];
      try {
        std::vector<int> peers;
        for (int n : SessionNodes(code, res.node)) {
          if (std::find(nodes.begin(), nodes.end(), n) != nodes.end()) peers.push_back(n);
        }
        SessionInfo si{session, static_cast<uint8_t>(code), ring, res.node, peers};
        auto net = hub.Connect(si);
        std::unique_ptr<Preprocessing> owned =
            opts.source ? opts.source(res.node)
                        : std::make_unique<DealerSource>(ring, code, res.node, opts.seed,
                                                         opts.dealer);
        Preprocessing& pre = *owned;
        const Key local = DeriveKey(opts.seed, "party-local/" + std::to_string(res.node));
        Party party(*net, pre, code, local, opts.party);
        if (opts.setup) opts.setup(party);
        try {
          fn(party);
        } catch (...) {
          res.rounds = net->rounds();
          res.bytes_sent = net->total_bytes_sent();
          res.transcript = net->transcript();
          res.consumed = pre.consumed();
          throw;
        }
        res.rounds = net->rounds();
        res.bytes_sent = net->total_bytes_sent();
        res.transcript = net->transcript();
        res.consumed = pre.consumed();
      } catch (...) {
        res.error = ClassifyCurrentException(&res.message);
        hub.Shutdown();
      }
    });
  }
  for (auto& th : threads) th.join();
  return results;
}

const NodeResult* FirstFailure(const std::vector<NodeResult>& results) {
  const NodeResult* any = nullptr;
  for (const auto& r : results) {
    if (r.ok()) continue;
    if (r.error != ErrorKind::kTransport) return &r;
    if (!any) any = &r;
  }
  return any;
}

}  // namespace obliv1d
