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

#include "obliv1d/transport.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>

namespace obliv1d {

std::vector<uint8_t> EncodeFrame(const Frame& frame) {
  const size_t body = 1 + 8 + frame.payload.size();
  if (body > kMaxFrameBytes) throw ProtocolError("frame too large");
  std::vector<uint8_t> w;
  w.reserve(4 + body);
  for (int i = 3; i >= 0; --i) w.push_back(static_cast<uint8_t>(body >> (8 * i)));
  w.push_back(static_cast<uint8_t>(frame.type));
  for (int i = 7; i >= 0; --i) {
    w.push_back(static_cast<uint8_t>(frame.session_id >> (8 * i)));
  }
  w.insert(w.end(), frame.payload.begin(), frame.payload.end());
  return w;
}

Frame DecodeFrame(std::span<const uint8_t> wire) {
  if (wire.size() < kFrameHeaderBytes) {
    throw ProtocolError("truncated frame header (" +
                        std::to_string(wire.size()) + " bytes)");
  }
  uint32_t body = 0;
  for (int i = 0; i < 4; ++i) body = body << 8 | wire[i];
  if (body < 9 || body > kMaxFrameBytes) {
    throw ProtocolError("invalid frame length " + std::to_string(body));
  }
  if (wire.size() != 4 + size_t{body}) {
    throw ProtocolError("frame length " + std::to_string(body) +
                        " disagrees with " + std::to_string(wire.size() - 4) +
                        " received bytes");
  }
  Frame f;
  uint8_t t = wire[4];
  if (t < static_cast<uint8_t>(MsgType::kHello) ||
      t > static_cast<uint8_t>(MsgType::kText)) {
    throw ProtocolError("unknown message type " + std::to_string(t));
  }
  f.type = static_cast<MsgType>(t);
  for (int i = 0; i < 8; ++i) f.session_id = f.session_id << 8 | wire[5 + i];
  f.payload.assign(wire.begin() + kFrameHeaderBytes, wire.end());
  return f;
}

// ---------------------------------------------------------------------------
// Network

Network::Network(SessionInfo info, std::map<int, Channel> channels)
    : info_(std::move(info)), channels_(std::move(channels)) {
  for (auto& [peer, ch] : channels_) stats_[peer] = {};
}

Network::~Network() { Close(); }

std::vector<int> Network::peers() const {
  std::vector<int> p;
  for (auto& [peer, ch] : channels_) p.push_back(peer);
  return p;
}

Link& Network::Out(int peer) {
  auto it = channels_.find(peer);
  if (it == channels_.end()) {
    throw UsageError("node " + std::to_string(self()) + " has no channel to " +
                     std::to_string(peer));
  }
  return *it->second.out;
}

Link& Network::In(int peer) {
  auto it = channels_.find(peer);
  if (it == channels_.end()) {
    throw UsageError("node " + std::to_string(self()) + " has no channel from " +
                     std::to_string(peer));
  }
  return *it->second.in;
}

void Network::CountSend(int peer, size_t bytes) {
  if (last_was_recv_) {
    ++rounds_;
    last_was_recv_ = false;
  }
  stats_[peer].bytes_sent += bytes;
  stats_[peer].messages_sent += 1;
}

void Network::SendBytes(int peer, MsgType type, std::vector<uint8_t> payload) {
  Frame f{type, info_.session_id, std::move(payload)};
  auto wire = EncodeFrame(f);
  CountSend(peer, wire.size());
  std::vector<uint8_t> link(transcript_.begin(), transcript_.end());
  link.push_back(static_cast<uint8_t>(peer));
  link.insert(link.end(), wire.begin(), wire.end());
  transcript_ = Sha256(link);
  Out(peer).Send(std::move(wire));
}

std::vector<uint8_t> Network::RecvBytes(int peer, MsgType expected) {
  auto wire = In(peer).Recv();
  last_was_recv_ = true;
  stats_[peer].bytes_received += wire.size();
  stats_[peer].messages_received += 1;
  Frame f = DecodeFrame(wire);
  if (f.session_id != info_.session_id) {
    throw ProtocolError("frame from node " + std::to_string(peer) +
                        " carries foreign session id");
  }
  if (f.type != expected) {
    throw ProtocolError("expected message type " +
                        std::to_string(static_cast<int>(expected)) + " from node " +
                        std::to_string(peer) + ", got " +
                        std::to_string(static_cast<int>(f.type)));
  }
  return std::move(f.payload);
}

void Network::Send(int peer, std::span<const u128> elems) {
  std::vector<uint8_t> payload;
  info_.ring.Serialize(elems, payload);
  SendBytes(peer, MsgType::kData, std::move(payload));
}

Vec Network::Recv(int peer) {
  return info_.ring.Deserialize(RecvBytes(peer, MsgType::kData));
}

uint64_t Network::total_bytes_sent() const {
  uint64_t t = 0;
  for (auto& [p, s] : stats_) t += s.bytes_sent;
  return t;
}

void Network::ResetCounters() {
  for (auto& [p, s] : stats_) s = {};
  rounds_ = 0;
  last_was_recv_ = true;
}

void Network::Close() {
  for (auto& [peer, ch] : channels_) {
    if (ch.out) ch.out->Close();
    if (ch.in) ch.in->Close();
  }
}

namespace {

std::vector<uint8_t> HelloPayload(const SessionInfo& info) {
  std::vector<uint8_t> p;
  p.push_back(kProtocolVersion);
  p.push_back(static_cast<uint8_t>(info.self));
  p.push_back(info.scheme_code);
  auto rd = info.ring.DescriptorBytes();
  p.insert(p.end(), rd.begin(), rd.end());
  return p;
}

void CheckHello(const SessionInfo& info, int peer,
                const std::vector<uint8_t>& p) {
  const std::string who = "handshake with node " + std::to_string(peer) + ": ";
  if (p.empty() || p[0] != kProtocolVersion) {
    throw ProtocolError(who + "protocol version mismatch");
  }
  if (p.size() != 3 + 20) throw ProtocolError(who + "malformed hello");
  if (p[1] != peer) throw ProtocolError(who + "peer announced a different id");
  if (p[2] != info.scheme_code) throw ProtocolError(who + "scheme mismatch");
  Ring theirs = Ring::FromDescriptorBytes({p.data() + 3, 20});
  if (!(theirs == info.ring)) {
    throw ProtocolError(who + "ring mismatch (" + theirs.Name() + " vs " +
                        info.ring.Name() + ")");
  }
}

}  // namespace

void Network::Handshake() {
  auto hello = HelloPayload(info_);
  for (int peer : peers()) SendBytes(peer, MsgType::kHello, hello);
  for (int peer : peers()) {
    CheckHello(info_, peer, RecvBytes(peer, MsgType::kHello));
  }
  ResetCounters();
}

// ---------------------------------------------------------------------------
// Simulated backend

class SimulatedHub::QueueLink : public Link {
 public:
  explicit QueueLink(std::shared_ptr<Queue> q) : q_(std::move(q)) {}

  void Send(std::vector<uint8_t> wire) override {
    std::lock_guard<std::mutex> lock(q_->mu);
    if (q_->closed) throw TransportError("peer disconnected");
    q_->items.push_back(std::move(wire));
    q_->cv.notify_all();
  }

  std::vector<uint8_t> Recv() override {
    std::unique_lock<std::mutex> lock(q_->mu);
    q_->cv.wait(lock, [&] { return !q_->items.empty() || q_->closed; });
    if (q_->items.empty()) throw TransportError("peer disconnected");
    auto w = std::move(q_->items.front());
    q_->items.pop_front();
    return w;
  }

  void Close() override {
    std::lock_guard<std::mutex> lock(q_->mu);
    q_->closed = true;
    q_->cv.notify_all();
  }

 private:
  std::shared_ptr<Queue> q_;
};

SimulatedHub::SimulatedHub(std::vector<int> nodes) : nodes_(std::move(nodes)) {
  for (int a : nodes_) {
    for (int b : nodes_) {
      if (a != b) queues_[{a, b}] = std::make_shared<Queue>();
    }
  }
}

SimulatedHub::Queue& SimulatedHub::Q(int from, int to) {
  auto it = queues_.find({from, to});
  if (it == queues_.end()) throw UsageError("no simulated queue for that pair");
  return *it->second;
}

std::unique_ptr<Network> SimulatedHub::Attach(const SessionInfo& info) {
  std::map<int, Network::Channel> ch;
  for (int peer : info.nodes) {
    if (peer == info.self) continue;
    ch[peer].out = std::make_unique<QueueLink>(queues_.at({info.self, peer}));
    ch[peer].in = std::make_unique<QueueLink>(queues_.at({peer, info.self}));
  }
  return std::make_unique<Network>(info, std::move(ch));
}

std::unique_ptr<Network> SimulatedHub::Connect(const SessionInfo& info) {
  auto net = Attach(info);
  net->Handshake();
  return net;
}

void SimulatedHub::InjectRaw(int from, int to, std::vector<uint8_t> wire) {
  Queue& q = Q(from, to);
  std::lock_guard<std::mutex> lock(q.mu);
  q.items.push_back(std::move(wire));
  q.cv.notify_all();
}

void SimulatedHub::Shutdown() {
  for (auto& [k, q] : queues_) {
    std::lock_guard<std::mutex> lock(q->mu);
    q->closed = true;
    q->cv.notify_all();
  }
}

// ---------------------------------------------------------------------------
// TCP backend

namespace {

class TcpReadLink : public Link {
 public:
  TcpReadLink(int fd, std::chrono::milliseconds timeout)
      : fd_(fd), timeout_(timeout) {}
  ~TcpReadLink() override { Close(); }

  void Send(std::vector<uint8_t>) override {
    throw UsageError("read-only link");
  }

  std::vector<uint8_t> Recv() override {
    std::vector<uint8_t> wire(4);
    ReadExact(wire.data(), 4, /*allow_eof=*/true);
    uint32_t body = 0;
    for (int i = 0; i < 4; ++i) body = body << 8 | wire[i];
    if (body < 9 || body > kMaxFrameBytes) {
      throw ProtocolError("invalid frame length " + std::to_string(body));
    }
    wire.resize(4 + size_t{body});
    ReadExact(wire.data() + 4, body, false);
    return wire;
  }

  void Close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  void ReadExact(uint8_t* p, size_t n, bool allow_eof) {
    size_t got = 0;
    while (got < n) {
      if (fd_ < 0) throw TransportError("link closed");
      pollfd pfd{fd_, POLLIN, 0};
      int pr = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
      if (pr == 0) throw TransportError("receive timed out");
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll: ") + std::strerror(errno));
      }
      ssize_t r = ::recv(fd_, p + got, n - got, 0);
      if (r == 0) {
        if (got == 0 && allow_eof) throw TransportError("peer disconnected");
        throw ProtocolError("connection closed mid-frame");
      }
      if (r < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("recv: ") + std::strerror(errno));
      }
      got += static_cast<size_t>(r);
    }
  }

  int fd_;
  std::chrono::milliseconds timeout_;
};

// Writes happen on a dedicated thread so that two peers sending large
// batches to each other cannot deadlock on full socket buffers.
class TcpWriteLink : public Link {
 public:
  explicit TcpWriteLink(int fd) : fd_(fd), writer_([this] { Run(); }) {}
  ~TcpWriteLink() override {
    Close();
    if (writer_.joinable()) writer_.join();
    if (fd_ >= 0) ::close(fd_);
  }

  void Send(std::vector<uint8_t> wire) override {
    std::lock_guard<std::mutex> lock(mu_);
    if (failed_) throw TransportError("peer disconnected");
    if (closed_) throw TransportError("link closed");
    pending_.push_back(std::move(wire));
    cv_.notify_all();
  }

  std::vector<uint8_t> Recv() override { throw UsageError("write-only link"); }

  void Close() override {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

 private:
  void Run() {
    for (;;) {
      std::vector<uint8_t> w;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return !pending_.empty() || closed_; });
        if (pending_.empty()) return;
        w = std::move(pending_.front());
        pending_.pop_front();
      }
      size_t sent = 0;
      while (sent < w.size()) {
        ssize_t r = ::send(fd_, w.data() + sent, w.size() - sent, MSG_NOSIGNAL);
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) {
          std::lock_guard<std::mutex> lock(mu_);
          failed_ = true;
          pending_.clear();
          return;
        }
        sent += static_cast<size_t>(r);
      }
    }
  }

  int fd_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::vector<uint8_t>> pending_;
  bool closed_ = false;
  bool failed_ = false;
  std::thread writer_;
};

int ListenOn(uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError("socket failed");
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(fd, 16) < 0) {
    ::close(fd);
    throw TransportError("cannot listen on port " + std::to_string(port) +
                         ": " + std::strerror(errno));
  }
  return fd;
}

int DialWithRetry(const Endpoint& ep,
                  std::chrono::steady_clock::time_point deadline) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  std::string port = std::to_string(ep.port);
  if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
    throw TransportError("cannot resolve " + ep.host);
  }
  for (;;) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return fd;
    }
    if (fd >= 0) ::close(fd);
    if (std::chrono::steady_clock::now() > deadline) {
      ::freeaddrinfo(res);
      throw TransportError("timed out connecting to " + ep.host + ":" + port);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

}  // namespace

Endpoint ParseEndpoint(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos) throw UsageError("endpoint needs host:port: " + s);
  Endpoint ep;
  ep.host = s.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(s.substr(colon + 1));
  } catch (...) {
    throw UsageError("bad port in endpoint " + s);
  }
  if (port <= 0 || port > 65535) throw UsageError("bad port in endpoint " + s);
  ep.port = static_cast<uint16_t>(port);
  return ep;
}

std::unique_ptr<Network> ConnectTcp(const SessionInfo& info,
                                    const std::map<int, Endpoint>& endpoints,
                                    std::chrono::milliseconds timeout) {
  auto self_ep = endpoints.find(info.self);
  if (self_ep == endpoints.end()) throw UsageError("own endpoint missing");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int lfd = ListenOn(self_ep->second.port);

  std::map<int, Network::Channel> ch;
  std::vector<int> peers;
  for (int n : info.nodes) {
    if (n != info.self) peers.push_back(n);
  }
  for (int peer : peers) {
    auto ep = endpoints.find(peer);
    if (ep == endpoints.end()) {
      ::close(lfd);
      throw UsageError("endpoint for node " + std::to_string(peer) + " missing");
    }
    int fd = DialWithRetry(ep->second, deadline);
    // The first byte on an outgoing connection names the dialing node.
    uint8_t id = static_cast<uint8_t>(info.self);
    if (::send(fd, &id, 1, MSG_NOSIGNAL) != 1) {
      ::close(fd);
      throw TransportError("failed to announce node id");
    }
    ch[peer].out = std::make_unique<TcpWriteLink>(fd);
  }
  size_t accepted = 0;
  while (accepted < peers.size()) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    pollfd pfd{lfd, POLLIN, 0};
    if (left.count() <= 0 ||
        ::poll(&pfd, 1, static_cast<int>(left.count())) <= 0) {
      ::close(lfd);
      throw TransportError("timed out waiting for peers to connect");
    }
    int fd = ::accept(lfd, nullptr, nullptr);
    if (fd < 0) continue;
    uint8_t id = 0;
    if (::recv(fd, &id, 1, MSG_WAITALL) != 1 ||
        std::find(peers.begin(), peers.end(), id) == peers.end() ||
        ch[id].in) {
      ::close(fd);
      continue;
    }
    ch[id].in = std::make_unique<TcpReadLink>(fd, timeout);
    ++accepted;
  }
  ::close(lfd);
  auto net = std::make_unique<Network>(info, std::move(ch));
  net->Handshake();
  return net;
}

// ---------------------------------------------------------------------------
// Commit-reveal

Digest Commit(std::span<const uint8_t> payload, std::span<const uint8_t> nonce) {
  std::vector<uint8_t> buf(payload.begin(), payload.end());
  buf.insert(buf.end(), nonce.begin(), nonce.end());
  return Sha256(buf);
}

std::vector<std::vector<uint8_t>> CommitReveal(
    Network& net, const std::vector<int>& parties,
    const std::vector<uint8_t>& payload, Prg& prg) {
  const int self = net.self();
  std::vector<uint8_t> nonce(32);
  prg.Fill(nonce);
  Digest mine = Commit(payload, nonce);

  std::map<int, Digest> commitments;
  commitments[self] = mine;
  for (int p : parties) {
    if (p != self) net.SendBytes(p, MsgType::kCommit, {mine.begin(), mine.end()});
  }
  for (int p : parties) {
    if (p == self) continue;
    auto c = net.RecvBytes(p, MsgType::kCommit);
    if (c.size() != 32) throw ProtocolError("malformed commitment");
    std::copy(c.begin(), c.end(), commitments[p].begin());
  }

  if (parties.size() >= 3) {
    std::vector<uint8_t> all;
    for (int p : parties) all.insert(all.end(), commitments[p].begin(), commitments[p].end());
    Digest view = Sha256(all);
    for (int p : parties) {
      if (p != self) net.SendBytes(p, MsgType::kEcho, {view.begin(), view.end()});
    }
    for (int p : parties) {
      if (p == self) continue;
      auto e = net.RecvBytes(p, MsgType::kEcho);
      if (!std::equal(e.begin(), e.end(), view.begin(), view.end())) {
        throw AbortError("commitment views disagree with node " +
                         std::to_string(p) + " (equivocation)");
      }
    }
  }

  std::vector<uint8_t> opening = payload;
  opening.insert(opening.end(), nonce.begin(), nonce.end());
  for (int p : parties) {
    if (p != self) net.SendBytes(p, MsgType::kReveal, opening);
  }
  std::vector<std::vector<uint8_t>> out;
  for (int p : parties) {
    if (p == self) {
      out.push_back(payload);
      continue;
    }
    auto o = net.RecvBytes(p, MsgType::kReveal);
    if (o.size() < 32) throw AbortError("short reveal from node " + std::to_string(p));
    std::span<const uint8_t> body(o.data(), o.size() - 32);
    std::span<const uint8_t> n(o.data() + o.size() - 32, 32);
    Digest d = Commit(body, n);
    if (d != commitments[p]) {
      throw AbortError("reveal from node " + std::to_string(p) +
                       " does not match its commitment");
    }
    out.emplace_back(body.begin(), body.end());
  }
  return out;
}

}  // namespace obliv1d
