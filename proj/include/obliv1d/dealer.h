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

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "obliv1d/crypto.h"
#include "obliv1d/ring.h"
#include "obliv1d/scheme.h"
#include "obliv1d/sharing.h"

namespace obliv1d {

struct TripleBatch {
  ShareVec a, b, c;
};

// Row-major shares of A (m x k), B (k x n) and C = A * B (m x n).
struct MatrixTriple {
  size_t m = 0, k = 0, n = 0;
  ShareVec a, b, c;
};

// Input/output masks. `plain` is filled only on the owner's node; compute
// nodes receive `shares`, the owner (if not a compute node) receives none.
struct MaskBatch {
  ShareVec shares;
  Vec plain;
};

// Server i holds K_i and K_{i+1}.
struct PrssKeys {
  Key own{};
  Key next{};
};

// Material kinds, used for metering and budgets.
inline constexpr const char* kKindTriples = "triples";
inline constexpr const char* kKindMatrix = "matrix-triple-elements";
inline constexpr const char* kKindBits = "bits";
inline constexpr const char* kKindBounded = "bounded";
inline constexpr const char* kKindFieldBits = "field-bits";
inline constexpr const char* kKindMasksPrefix = "masks:";

// Elements consumed per kind.
using Consumption = std::map<std::string, uint64_t>;

// Source of input-independent correlated randomness for one node. Calls
// must be made in the same order on every node of a session; each item is
// issued once.
class Preprocessing {
 public:
  virtual ~Preprocessing() = default;

  virtual const Ring& ring() const = 0;
  virtual SchemeCode scheme() const = 0;
  virtual int node() const = 0;

  // Beaver triples. Not used by the 3PC schemes.
  virtual TripleBatch Triples(size_t n) = 0;
  virtual bool HasMatrixTriples() const { return false; }
  virtual MatrixTriple MatrixTriples(size_t m, size_t k, size_t n);
  // Shares of uniform bits.
  virtual ShareVec Bits(size_t n) = 0;
  // Shares of uniform values in [0, 2^width); width < bit length.
  virtual ShareVec Bounded(int width, size_t n);
  // For a prime ring: bit shares (bit_length per element, LSB first) of
  // uniform values below p.
  virtual ShareVec FieldBits(size_t n);
  virtual MaskBatch Masks(int owner, size_t n) = 0;

  virtual u128 MacKeyShare() const = 0;
  virtual PrssKeys Prss() const = 0;

  const Consumption& consumed() const { return consumed_; }

 protected:
  void Meter(const std::string& kind, uint64_t n);

  // Applied by Meter; kinds absent from the map are unlimited.
  std::map<std::string, uint64_t> budget_;

 private:
  Consumption consumed_;
};

struct DealerOptions {
  std::map<std::string, uint64_t> budget;
  // Check the reconstruction invariant of roughly 1% of issued items.
  bool audit = false;
};

// In-process trusted dealer. Every node constructs one with the same seed;
// each derives the full sharing from per-kind pseudorandom streams and
// keeps only its own share.
class DealerSource : public Preprocessing {
 public:
  DealerSource(const Ring& ring, SchemeCode scheme, int node, const Key& seed,
               DealerOptions opts = {});

  const Ring& ring() const override { return ring_; }
  SchemeCode scheme() const override { return scheme_; }
  int node() const override { return node_; }

  TripleBatch Triples(size_t n) override;
  bool HasMatrixTriples() const override { return true; }
  MatrixTriple MatrixTriples(size_t m, size_t k, size_t n) override;
  ShareVec Bits(size_t n) override;
  ShareVec Bounded(int width, size_t n) override;
  ShareVec FieldBits(size_t n) override;
  MaskBatch Masks(int owner, size_t n) override;
  u128 MacKeyShare() const override;
  PrssKeys Prss() const override;

  // Number of audited items and audit failures so far.
  uint64_t audited() const { return audited_; }

 private:
  Prg& Stream(const std::string& kind);
  // All parties' shares of `secrets`; returns this node's share (or an
  // empty vector for non-compute nodes).
  ShareVec Deal(Prg& prg, const Vec& secrets);

  Ring ring_;
  SchemeCode scheme_;
  SchemeInfo info_;
  int node_;
  Key seed_;
  DealerOptions opts_;
  Vec alpha_shares_;
  std::map<std::string, std::unique_ptr<Prg>> streams_;
  Prg audit_prg_;
  uint64_t audited_ = 0;
};

// Counts requested from an ahead-of-time dealer run.
struct PreprocCounts {
  uint64_t triples = 0;
  uint64_t bits = 0;
  std::map<int, uint64_t> masks;  // owner node -> count
};

// Writes one file per node into `dir` (node<i>.preproc) and returns the
// paths. The packed records come from a DealerSource with `seed`.
std::vector<std::string> WritePreprocFiles(const std::string& dir, const Ring& ring,
                                           SchemeCode scheme, const Key& seed,
                                           const PreprocCounts& counts);

// Reads a file written by WritePreprocFiles. Running out of any kind throws
// BudgetError. Bounded values and field bits are composed from bits.
class FileSource : public Preprocessing {
 public:
  explicit FileSource(const std::string& path);

  const Ring& ring() const override { return ring_; }
  SchemeCode scheme() const override { return scheme_; }
  int node() const override { return node_; }

  TripleBatch Triples(size_t n) override;
  ShareVec Bits(size_t n) override;
  MaskBatch Masks(int owner, size_t n) override;
  u128 MacKeyShare() const override { return mac_key_share_; }
  PrssKeys Prss() const override { return prss_; }

  uint64_t remaining(const std::string& kind) const;

 private:
  Ring ring_ = Ring::Prime64();
  SchemeCode scheme_ = SchemeCode::kSemi2pc;
  int node_ = 0;
  u128 mac_key_share_ = 0;
  PrssKeys prss_;
  TripleBatch triples_;
  size_t triple_pos_ = 0;
  ShareVec bits_;
  size_t bit_pos_ = 0;
  std::map<int, MaskBatch> masks_;
  std::map<int, size_t> mask_pos_;
};

// Serves only what a FileSource can serve (scalar triples, bits, masks),
// drawing from a DealerSource, and records the amounts in file units.
class RecordingSource : public Preprocessing {
 public:
  RecordingSource(const Ring& ring, SchemeCode scheme, int node, const Key& seed);

  const Ring& ring() const override { return inner_.ring(); }
  SchemeCode scheme() const override { return inner_.scheme(); }
  int node() const override { return inner_.node(); }

  TripleBatch Triples(size_t n) override;
  ShareVec Bits(size_t n) override;
  MaskBatch Masks(int owner, size_t n) override;
  u128 MacKeyShare() const override { return inner_.MacKeyShare(); }
  PrssKeys Prss() const override { return inner_.Prss(); }

  const PreprocCounts& counts() const { return counts_; }

 private:
  DealerSource inner_;
  PreprocCounts counts_;
};

// Pseudorandom replicated sharing from pairwise keys. Calls must be made in
// the same order by all three servers.
class PrssState {
 public:
  PrssState(const Ring& ring, const PrssKeys& keys);

  // u_i with u_1 + u_2 + u_3 = 0.
  Vec Zero(size_t n);
  // Replicated shares of a uniform value.
  ShareVec Random(size_t n);

 private:
  Ring ring_;
  Prg zero_own_, zero_next_, rand_own_, rand_next_;
};

}  // namespace obliv1d
