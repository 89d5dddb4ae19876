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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "obliv1d/crypto.h"
#include "obliv1d/ring.h"

namespace obliv1d {

inline constexpr uint8_t kProtocolVersion = 1;

// Wire frame: 4-byte big-endian length of everything after the length
// field, 1-byte type, 8-byte big-endian session id, payload.
enum class MsgType : uint8_t {
  kHello = 1,
  kData = 2,
  kCommit = 3,
  kEcho = 4,
  kReveal = 5,
  kText = 6,
};

inline constexpr size_t kFrameHeaderBytes = 13;
inline constexpr uint32_t kMaxFrameBytes = 1u << 30;

struct Frame {
  MsgType type = MsgType::kData;
  uint64_t session_id = 0;
  std::vector<uint8_t> payload;
};

std::vector<uint8_t> EncodeFrame(const Frame& frame);
// Parses one complete wire frame. Throws ProtocolError on any length or
// type inconsistency; never returns a partial payload.
Frame DecodeFrame(std::span<const uint8_t> wire);

// One direction of a point-to-point channel carrying whole wire frames.
class Link {
 public:
  virtual ~Link() = default;
  virtual void Send(std::vector<uint8_t> wire) = 0;
  virtual std::vector<uint8_t> Recv() = 0;
  virtual void Close() = 0;
};

// Everything a node advertises in its handshake.
struct SessionInfo {
  uint64_t session_id = 0;
  uint8_t scheme_code = 0;
  Ring ring = Ring::Prime64();
  int self = 0;
  // Every node taking part in the session, including self.
  std::vector<int> nodes;
};

struct PeerStats {
  uint64_t bytes_sent = 0;
  uint64_t bytes_received = 0;
  uint64_t messages_sent = 0;
  uint64_t messages_received = 0;
};

// Connected set of channels from one node to every other node of the
// session. Messages between a fixed pair are delivered in send order.
//
// A round is counted each time the node sends after having received (or
// at its first send), so a batch of sends followed by receives is one round.
class Network {
 public:
  struct Channel {
    std::unique_ptr<Link> out;
    std::unique_ptr<Link> in;
  };

  Network(SessionInfo info, std::map<int, Channel> channels);
  ~Network();
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  // Exchanges hello frames with every peer and validates version, scheme
  // and ring agreement. Throws ProtocolError on mismatch.
  void Handshake();

  int self() const { return info_.self; }
  const SessionInfo& info() const { return info_; }
  const Ring& ring() const { return info_.ring; }
  std::vector<int> peers() const;
  bool HasPeer(int node) const { return channels_.count(node) > 0; }

  void Send(int peer, std::span<const u128> elems);
  Vec Recv(int peer);
  void SendBytes(int peer, MsgType type, std::vector<uint8_t> payload);
  std::vector<uint8_t> RecvBytes(int peer, MsgType expected);

  uint64_t rounds() const { return rounds_; }
  const std::map<int, PeerStats>& stats() const { return stats_; }
  uint64_t total_bytes_sent() const;
  void ResetCounters();
  // Hash chain over every frame this node sent, with its destination.
  const Digest& transcript() const { return transcript_; }

  // Closes every link; blocked peers observe a TransportError.
  void Close();

 private:
  Link& Out(int peer);
  Link& In(int peer);
  void CountSend(int peer, size_t bytes);

  SessionInfo info_;
  std::map<int, Channel> channels_;
  std::map<int, PeerStats> stats_;
  uint64_t rounds_ = 0;
  bool last_was_recv_ = true;
  Digest transcript_{};
};

// In-process backend: one FIFO queue per ordered pair of nodes. Results
// are independent of thread scheduling because every queue is FIFO and
// receives block.
class SimulatedHub {
 public:
  explicit SimulatedHub(std::vector<int> nodes);

  // Builds the network for one node and runs the handshake.
  std::unique_ptr<Network> Connect(const SessionInfo& info);
  // Network without the handshake, for tests that drive it manually.
  std::unique_ptr<Network> Attach(const SessionInfo& info);

  // Pushes raw bytes onto the from->to queue, bypassing framing.
  void InjectRaw(int from, int to, std::vector<uint8_t> wire);
  // Closes every queue; pending and future receives fail.
  void Shutdown();

 private:
  struct Queue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<uint8_t>> items;
    bool closed = false;
  };
  class QueueLink;

  Queue& Q(int from, int to);

  std::vector<int> nodes_;
  std::map<std::pair<int, int>, std::shared_ptr<Queue>> queues_;
};

struct Endpoint {
  std::string host;
  uint16_t port = 0;
};

// Parses "host:port".
Endpoint ParseEndpoint(const std::string& s);

// TCP backend: node `info.self` listens on its own endpoint, opens one
// outgoing connection per peer and accepts one incoming connection per peer.
std::unique_ptr<Network> ConnectTcp(
    const SessionInfo& info, const std::map<int, Endpoint>& endpoints,
    std::chrono::milliseconds timeout = std::chrono::seconds(30));

// Commit-then-reveal exchange among `parties` (which must include self).
// Phase one sends SHA-256(payload || nonce); with three or more parties the
// received commitments are echoed so equivocation is noticed; phase two
// reveals payload and nonce. Any mismatch throws AbortError. Returns the
// payloads ordered as `parties`.
std::vector<std::vector<uint8_t>> CommitReveal(
    Network& net, const std::vector<int>& parties,
    const std::vector<uint8_t>& payload, Prg& prg);

Digest Commit(std::span<const uint8_t> payload, std::span<const uint8_t> nonce);

}  // namespace obliv1d
