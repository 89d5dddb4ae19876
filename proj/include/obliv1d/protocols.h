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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obliv1d/dealer.h"
#include "obliv1d/scheme.h"
#include "obliv1d/sharing.h"
#include "obliv1d/transport.h"

namespace obliv1d {

enum class MacCheckMode { kBatched, kEveryOpen };

// Label of an outgoing element message; used by the tamper hook.
enum class MsgKind { kOpen, kBeaver, kSacrifice, kReshare, kInput, kOutput };

const char* MsgKindName(MsgKind k);

// Lets tests act as an active adversary: called on every element payload
// this node sends, before serialization.
using TamperFn = std::function<void(MsgKind kind, int to, Vec& payload)>;

struct PartyOptions {
  MacCheckMode mac_check = MacCheckMode::kBatched;
  // Lower bound on triples produced per sacrifice batch (active 3PC).
  size_t triple_batch = 256;
};

// One node's protocol state in a session. Compute nodes run the online
// protocols; client nodes (3PC Alice/Bob, third-party receivers) only
// provide inputs and receive outputs.
class Party {
 public:
  Party(Network& net, Preprocessing& pre, SchemeCode code, const Key& local_seed,
        PartyOptions opts = {});

  const Ring& ring() const { return ring_; }
  const SchemeInfo& info() const { return info_; }
  SchemeCode code() const { return info_.code; }
  int node() const { return net_.self(); }
  bool is_compute() const { return info_.is_compute(node()); }
  const ShareContext& ctx() const { return ctx_; }
  Network& net() { return net_; }
  Preprocessing& pre() { return pre_; }
  Prg& local_prg() { return local_prg_; }
  const PartyOptions& options() const { return opts_; }

  void SetTamper(TamperFn fn) { tamper_ = std::move(fn); }
  // Sends elements through the tamper hook.
  void SendElems(MsgKind kind, int to, Vec payload);

  // (opened value, MAC fragment) pairs awaiting the batched check.
  struct PendingCheck {
    u128 value;
    u128 mac;
  };
  std::vector<PendingCheck>& pending() { return pending_; }

  // Verified triples waiting to be consumed (active 3PC).
  TripleBatch& triple_pool() { return pool_; }

  PrssState& prss();

 private:
  Network& net_;
  Preprocessing& pre_;
  Ring ring_;
  SchemeInfo info_;
  ShareContext ctx_;
  PartyOptions opts_;
  Prg local_prg_;
  TamperFn tamper_;
  std::vector<PendingCheck> pending_;
  TripleBatch pool_;
  std::unique_ptr<PrssState> prss_;
};

// Compute nodes exchange SHA-256 digests of `bytes` and throw AbortError
// unless all agree.
void AgreeOnBytes(Party& p, std::span<const uint8_t> bytes, const std::string& what);

// --- Trivial shares -------------------------------------------------------

ShareVec Constant(Party& p, size_t n, u128 value);
ShareVec Constants(Party& p, const Vec& values);
// n copies of the single element of x.
ShareVec Broadcast(const ShareVec& x, size_t n);

// --- Opening and MAC checks ----------------------------------------------

// Reveals x to every compute node. Authenticated openings queue their MAC
// residues (checked at the next flush); replicated active openings
// cross-check the two received copies and abort on mismatch.
Vec Open(Party& p, const ShareVec& x, MsgKind kind = MsgKind::kOpen);

// Verifies all pending MAC relations with a random linear combination whose
// coefficients and result are exchanged by commit-reveal. Throws AbortError
// on failure. No-op for schemes without MACs or with nothing pending.
void MacCheckFlush(Party& p);

// --- Multiplication -------------------------------------------------------

ShareVec Mul(Party& p, const ShareVec& x, const ShareVec& y);
// Row-major x (m x k) times y (k x n).
ShareVec MatMul(Party& p, const ShareVec& x, const ShareVec& y, size_t m, size_t k,
                size_t n);

// Active 3PC: produces verified triples by optimistic replicated
// multiplication checked against a second triple with a public random
// challenge. Throws AbortError when a check opens nonzero.
TripleBatch SacrificeTriples(Party& p, size_t n);
MatrixTriple SacrificeMatrixTriple(Party& p, size_t m, size_t k, size_t n);

// --- Comparison building blocks ------------------------------------------

// [a_e < b_e] for public a_e and b_e given as bit shares. Instance e has
// widths[e] bits, LSB first, stored consecutively in `bits`.
ShareVec BitLT(Party& p, const Vec& a, const ShareVec& bits,
               const std::vector<int>& widths);

enum class TruncMode { kDeterministic, kProbabilistic };

// floor(x / 2^m) for signed |x| < 2^(bits-1). Probabilistic mode rounds up
// with probability (x mod 2^m) / 2^m.
ShareVec Trunc(Party& p, const ShareVec& x, int m, int bits,
               TruncMode mode = TruncMode::kDeterministic);
inline ShareVec TruncDet(Party& p, const ShareVec& x, int m, int bits) {
  return Trunc(p, x, m, bits, TruncMode::kDeterministic);
}
inline ShareVec TruncProb(Party& p, const ShareVec& x, int m, int bits) {
  return Trunc(p, x, m, bits, TruncMode::kProbabilistic);
}

// floor(x / 2^n) for a shared shift 0 <= n <= n_max; `shift` has one
// element that applies to all of x.
ShareVec TruncSecret(Party& p, const ShareVec& x, const ShareVec& shift, int bits,
                     int n_max = 31, TruncMode mode = TruncMode::kDeterministic);

// [x < 0] and [x == 0] for signed |x| < 2^(value_bits-1).
ShareVec Ltz(Party& p, const ShareVec& x);
ShareVec Eqz(Party& p, const ShareVec& x);

// b ? x : y, elementwise.
ShareVec Select(Party& p, const ShareVec& b, const ShareVec& x, const ShareVec& y);
// max(x, t) as Select(Ltz(x - t), t, x).
ShareVec ReluThreshold(Party& p, const ShareVec& x, const ShareVec& t);

struct ArgmaxResult {
  ShareVec index;
  ShareVec value;
};
// Index of the first maximal element; `groups` consecutive vectors of
// length x.size() / groups are handled in one batch.
ArgmaxResult Argmax(Party& p, const ShareVec& x, size_t groups = 1);

// --- Fixed point -----------------------------------------------------------

// round(x * y / 2^f) for fixed-point operands with |x * y| < 2^(bits-1).
ShareVec FixMul(Party& p, const ShareVec& x, const ShareVec& y, int f, int bits);

// num / den in fixed point with f fractional bits. den holds integers in
// [1, d_max] (one element per num element, or a single element).
ShareVec DivSecret(Party& p, const ShareVec& num, const ShareVec& den, int f,
                   int d_max = 64);

// x / P for a public P >= 1: multiply by round(2^30 / P), truncate by 30.
inline constexpr int kPublicFracBits = 30;
ShareVec MulPublicFrac(Party& p, const ShareVec& x, uint64_t divisor, int bits);

// --- Inputs and outputs ---------------------------------------------------

// Input of `owner` into the compute nodes. On the owner, `values` carries
// the plaintext; compute nodes return their shares. A client owner returns
// an empty share vector.
ShareVec InputFrom(Party& p, int owner, size_t n, const Vec* values = nullptr);

// Delivers y to `target`: compute nodes open y + r under a mask owned by
// the target, run the mandatory MAC check, and send the masked value to a
// non-compute target. Returns the plaintext on the target, empty elsewhere.
// A target that receives differing copies aborts.
Vec RevealTo(Party& p, int target, const ShareVec& y, size_t n);

}  // namespace obliv1d
