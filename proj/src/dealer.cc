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

#include "obliv1d/dealer.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace obliv1d {
namespace {

constexpr char kMagic[8] = {'O', 'B', 'L', 'V', '1', 'D', 'P', 'P'};
constexpr uint8_t kFileVersion = 1;

// Elementwise sum_i 2^i * bits[e * width + i].
ShareVec ComposeBits(const Ring& ring, const ShareVec& bits, int width, size_t n) {
  ShareVec out = EmptyShares(bits.scheme, n);
  for (size_t e = 0; e < n; ++e) {
    for (int i = width - 1; i >= 0; --i) {
      const size_t idx = e * width + i;
      out.a[e] = ring.Add(ring.Add(out.a[e], out.a[e]), bits.a[idx]);
      if (bits.has_b()) out.b[e] = ring.Add(ring.Add(out.b[e], out.b[e]), bits.b[idx]);
    }
  }
  return out;
}

void PutU64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::vector<uint8_t> data) : data_(std::move(data)) {}

  std::span<const uint8_t> Take(size_t n) {
    if (pos_ + n > data_.size()) throw ValidationError("preprocessing file is truncated");
    std::span<const uint8_t> s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  uint8_t U8() { return Take(1)[0]; }
  uint64_t U64() {
    auto s = Take(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | s[i];
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::vector<uint8_t> data_;
  size_t pos_ = 0;
};

void PutShares(const Ring& ring, const ShareVec& s, std::vector<uint8_t>& out) {
  ring.Serialize(s.a, out);
  if (s.has_b()) ring.Serialize(s.b, out);
}

ShareVec TakeShares(const Ring& ring, Scheme scheme, size_t n, Reader& in) {
  ShareVec s{scheme, {}, {}};
  s.a = ring.Deserialize(in.Take(n * ring.element_bytes()));
  if (s.has_b()) s.b = ring.Deserialize(in.Take(n * ring.element_bytes()));
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Preprocessing defaults

void Preprocessing::Meter(const std::string& kind, uint64_t n) {
  uint64_t& used = consumed_[kind];
  auto it = budget_.find(kind);
  if (it != budget_.end() && used + n > it->second) {
    throw BudgetError("preprocessing budget for " + kind + " exhausted: " +
                      std::to_string(used + n) + " needed, " +
                      std::to_string(it->second) + " provisioned");
  }
  used += n;
}

MatrixTriple Preprocessing::MatrixTriples(size_t, size_t, size_t) {
  throw UsageError("this preprocessing source has no matrix triples");
}

ShareVec Preprocessing::Bounded(int width, size_t n) {
  if (width <= 0) return EmptyShares(Describe(scheme()).share_scheme, n);
  return ComposeBits(ring(), Bits(static_cast<size_t>(width) * n), width, n);
}

// Composed values exceed p - 1 with probability (2^L - p) / 2^L per element,
// below 2^-58 for the default prime.
ShareVec Preprocessing::FieldBits(size_t n) {
  return Bits(static_cast<size_t>(ring().bit_length()) * n);
}

// ---------------------------------------------------------------------------
// DealerSource

DealerSource::DealerSource(const Ring& ring, SchemeCode scheme, int node,
                           const Key& seed, DealerOptions opts)
    : ring_(ring),
      scheme_(scheme),
      info_(Describe(scheme)),
      node_(node),
      seed_(seed),
      opts_(std::move(opts)),
      audit_prg_(DeriveKey(seed, "audit")) {
  CheckSupported(scheme, ring);
  if (node < 0 || node >= info_.num_nodes()) {
    throw UsageError("node " + std::to_string(node) + " outside the topology");
  }
  budget_ = opts_.budget;
  if (info_.share_scheme == Scheme::kAuthenticated) {
    alpha_shares_ = Stream("mac-key").Uniform(ring_, info_.num_parties);
  }
}

Prg& DealerSource::Stream(const std::string& kind) {
  auto& p = streams_[kind];
  if (!p) p = std::make_unique<Prg>(DeriveKey(seed_, "stream:" + kind));
  return *p;
}

ShareVec DealerSource::Deal(Prg& prg, const Vec& secrets) {
  auto all = Share(ring_, info_.share_scheme, secrets, info_.num_parties, prg,
                   alpha_shares_);
  if (opts_.audit && !secrets.empty() && audit_prg_.NextU64() % 100 == 0) {
    ++audited_;
    if (Reconstruct(ring_, all) != secrets ||
        (info_.share_scheme == Scheme::kAuthenticated &&
         !MacRelationHolds(ring_, all, alpha_shares_))) {
      throw Error("dealer audit failed: issued shares do not reconstruct");
    }
  }
  if (!info_.is_compute(node_)) return EmptyShares(info_.share_scheme, 0);
  return std::move(all[node_]);
}

TripleBatch DealerSource::Triples(size_t n) {
  Meter(kKindTriples, n);
  Prg& prg = Stream(kKindTriples);
  Vec a = prg.Uniform(ring_, n), b = prg.Uniform(ring_, n), c(n);
  for (size_t i = 0; i < n; ++i) c[i] = ring_.Mul(a[i], b[i]);
  TripleBatch t;
  t.a = Deal(prg, a);
  t.b = Deal(prg, b);
  t.c = Deal(prg, c);
  return t;
}

MatrixTriple DealerSource::MatrixTriples(size_t m, size_t k, size_t n) {
  Meter(kKindMatrix, m * k + k * n + m * n);
  Prg& prg = Stream(kKindMatrix);
  Vec a = prg.Uniform(ring_, m * k), b = prg.Uniform(ring_, k * n), c(m * n, 0);
  for (size_t i = 0; i < m; ++i) {
    for (size_t t = 0; t < k; ++t) {
      const u128 ait = a[i * k + t];
      for (size_t j = 0; j < n; ++j) {
        c[i * n + j] = ring_.Add(c[i * n + j], ring_.Mul(ait, b[t * n + j]));
      }
    }
  }
  MatrixTriple mt{m, k, n, {}, {}, {}};
  mt.a = Deal(prg, a);
  mt.b = Deal(prg, b);
  mt.c = Deal(prg, c);
  return mt;
}

ShareVec DealerSource::Bits(size_t n) {
  Meter(kKindBits, n);
  Prg& prg = Stream(kKindBits);
  Vec v(n);
  for (auto& x : v) x = prg.Bit();
  return Deal(prg, v);
}

ShareVec DealerSource::Bounded(int width, size_t n) {
  if (width < 0 || width >= ring_.bit_length()) {
    throw UsageError("bounded random width " + std::to_string(width) +
                     " exceeds the ring");
  }
  Meter(kKindBounded, n);
  Prg& prg = Stream(kKindBounded);
  Vec v(n);
  for (auto& x : v) x = prg.UniformBits(width);
  return Deal(prg, v);
}

ShareVec DealerSource::FieldBits(size_t n) {
  const int L = ring_.bit_length();
  Meter(kKindFieldBits, n * L);
  Prg& prg = Stream(kKindFieldBits);
  Vec v(n * L);
  for (size_t e = 0; e < n; ++e) {
    u128 r = prg.Uniform(ring_);
    for (int i = 0; i < L; ++i) v[e * L + i] = (r >> i) & 1;
  }
  return Deal(prg, v);
}

MaskBatch DealerSource::Masks(int owner, size_t n) {
  const std::string kind = kKindMasksPrefix + std::to_string(owner);
  Meter(kind, n);
  Prg& prg = Stream(kind);
  Vec r = prg.Uniform(ring_, n);
  MaskBatch m;
  m.shares = Deal(prg, r);
  if (node_ == owner) m.plain = std::move(r);
  return m;
}

u128 DealerSource::MacKeyShare() const {
  if (alpha_shares_.empty() || !info_.is_compute(node_)) return 0;
  return alpha_shares_[node_];
}

PrssKeys DealerSource::Prss() const {
  PrssKeys k;
  if (info_.num_parties != 3 || !info_.is_compute(node_)) return k;
  k.own = DeriveKey(seed_, "prss:" + std::to_string(node_));
  k.next = DeriveKey(seed_, "prss:" + std::to_string((node_ + 1) % 3));
  return k;
}

// ---------------------------------------------------------------------------
// Files

std::vector<std::string> WritePreprocFiles(const std::string& dir, const Ring& ring,
                                           SchemeCode scheme, const Key& seed,
                                           const PreprocCounts& counts) {
  CheckSupported(scheme, ring);
  const SchemeInfo info = Describe(scheme);
  for (const auto& [owner, n] : counts.masks) {
    if (owner < 0 || owner >= info.num_nodes()) {
      throw UsageError("mask owner node " + std::to_string(owner) + " outside the topology");
    }
  }
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (int node : info.all_nodes()) {
    DealerSource src(ring, scheme, node, seed);
    const bool compute = info.is_compute(node);
    std::vector<uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kFileVersion);
    out.push_back(static_cast<uint8_t>(scheme));
    out.push_back(static_cast<uint8_t>(node));
    auto rd = ring.DescriptorBytes();
    out.insert(out.end(), rd.begin(), rd.end());
    const u128 alpha = src.MacKeyShare();
    ring.Serialize(std::span<const u128>(&alpha, 1), out);
    PrssKeys pk = src.Prss();
    out.insert(out.end(), pk.own.begin(), pk.own.end());
    out.insert(out.end(), pk.next.begin(), pk.next.end());

    const uint64_t triples = compute ? counts.triples : 0;
    const uint64_t bits = compute ? counts.bits : 0;
    PutU64(out, triples);
    PutU64(out, bits);
    std::vector<std::pair<int, uint64_t>> masks;
    for (const auto& [owner, n] : counts.masks) {
      if (compute || owner == node) masks.emplace_back(owner, n);
    }
    out.push_back(static_cast<uint8_t>(masks.size()));
    for (const auto& [owner, n] : masks) {
      out.push_back(static_cast<uint8_t>(owner));
      PutU64(out, n);
    }

    if (triples) {
      TripleBatch t = src.Triples(triples);
      PutShares(ring, t.a, out);
      PutShares(ring, t.b, out);
      PutShares(ring, t.c, out);
    }
    if (bits) PutShares(ring, src.Bits(bits), out);
    for (const auto& [owner, n] : masks) {
      MaskBatch m = src.Masks(owner, n);
      if (compute) PutShares(ring, m.shares, out);
      if (owner == node) ring.Serialize(m.plain, out);
    }

    std::string path = (std::filesystem::path(dir) /
                        ("node" + std::to_string(node) + ".preproc")).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(out.data()), out.size());
    if (!f) throw Error("cannot write " + path);
    paths.push_back(path);
  }
  return paths;
}

RecordingSource::RecordingSource(const Ring& ring, SchemeCode scheme, int node,
                                 const Key& seed)
    : inner_(ring, scheme, node, seed) {}

TripleBatch RecordingSource::Triples(size_t n) {
  counts_.triples += n;
  Meter(kKindTriples, n);
  return inner_.Triples(n);
}

ShareVec RecordingSource::Bits(size_t n) {
  counts_.bits += n;
  Meter(kKindBits, n);
  return inner_.Bits(n);
}

MaskBatch RecordingSource::Masks(int owner, size_t n) {
  counts_.masks[owner] += n;
  Meter(kKindMasksPrefix + std::to_string(owner), n);
  return inner_.Masks(owner, n);
}

FileSource::FileSource(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open preprocessing file " + path);
  Reader in(std::vector<uint8_t>(std::istreambuf_iterator<char>(f), {}));
  auto magic = in.Take(8);
  if (std::memcmp(magic.data(), kMagic, 8) != 0) {
    throw ValidationError(path + " is not a preprocessing file");
  }
  if (in.U8() != kFileVersion) throw ValidationError(path + ": unsupported version");
  uint8_t code = in.U8();
  if (code > 3) throw ValidationError(path + ": unknown scheme code");
  scheme_ = static_cast<SchemeCode>(code);
  const SchemeInfo info = Describe(scheme_);
  node_ = in.U8();
  if (node_ >= info.num_nodes()) throw ValidationError(path + ": node outside topology");
  ring_ = Ring::FromDescriptorBytes(in.Take(20));
  mac_key_share_ = ring_.Deserialize(in.Take(ring_.element_bytes()))[0];
  auto own = in.Take(32);
  std::copy(own.begin(), own.end(), prss_.own.begin());
  auto next = in.Take(32);
  std::copy(next.begin(), next.end(), prss_.next.begin());

  const uint64_t triples = in.U64(), bits = in.U64();
  const bool compute = info.is_compute(node_);
  std::vector<std::pair<int, uint64_t>> masks(in.U8());
  for (auto& [owner, n] : masks) {
    owner = in.U8();
    n = in.U64();
  }
  const Scheme s = info.share_scheme;
  if (triples) {
    triples_.a = TakeShares(ring_, s, triples, in);
    triples_.b = TakeShares(ring_, s, triples, in);
    triples_.c = TakeShares(ring_, s, triples, in);
  }
  bits_ = bits ? TakeShares(ring_, s, bits, in) : EmptyShares(s, 0);
  for (const auto& [owner, n] : masks) {
    MaskBatch m;
    m.shares = compute ? TakeShares(ring_, s, n, in) : EmptyShares(s, 0);
    if (owner == node_) m.plain = ring_.Deserialize(in.Take(n * ring_.element_bytes()));
    masks_[owner] = std::move(m);
    mask_pos_[owner] = 0;
  }
  if (!in.done()) throw ValidationError(path + ": trailing bytes");
  budget_[kKindTriples] = triples;
  budget_[kKindBits] = bits;
  for (const auto& [owner, n] : masks) budget_[kKindMasksPrefix + std::to_string(owner)] = n;
}

TripleBatch FileSource::Triples(size_t n) {
  Meter(kKindTriples, n);
  TripleBatch t{Slice(triples_.a, triple_pos_, n), Slice(triples_.b, triple_pos_, n),
                Slice(triples_.c, triple_pos_, n)};
  triple_pos_ += n;
  return t;
}

ShareVec FileSource::Bits(size_t n) {
  Meter(kKindBits, n);
  ShareVec s = Slice(bits_, bit_pos_, n);
  bit_pos_ += n;
  return s;
}

MaskBatch FileSource::Masks(int owner, size_t n) {
  const std::string kind = kKindMasksPrefix + std::to_string(owner);
  if (!masks_.count(owner)) {
    throw BudgetError("preprocessing file has no masks for node " + std::to_string(owner));
  }
  Meter(kind, n);
  const MaskBatch& all = masks_[owner];
  size_t& pos = mask_pos_[owner];
  MaskBatch m;
  m.shares = all.shares.size() ? Slice(all.shares, pos, n)
                               : EmptyShares(all.shares.scheme, 0);
  if (!all.plain.empty()) m.plain.assign(all.plain.begin() + pos, all.plain.begin() + pos + n);
  pos += n;
  return m;
}

uint64_t FileSource::remaining(const std::string& kind) const {
  auto b = budget_.find(kind);
  if (b == budget_.end()) return 0;
  auto c = consumed().find(kind);
  return b->second - (c == consumed().end() ? 0 : c->second);
}

// ---------------------------------------------------------------------------
// PRSS

PrssState::PrssState(const Ring& ring, const PrssKeys& keys)
    : ring_(ring),
      zero_own_(DeriveKey(keys.own, "zero")),
      zero_next_(DeriveKey(keys.next, "zero")),
      rand_own_(DeriveKey(keys.own, "rand")),
      rand_next_(DeriveKey(keys.next, "rand")) {}

Vec PrssState::Zero(size_t n) {
  Vec u(n);
  for (auto& v : u) v = ring_.Sub(zero_own_.Uniform(ring_), zero_next_.Uniform(ring_));
  return u;
}

ShareVec PrssState::Random(size_t n) {
  ShareVec s{Scheme::kReplicated, rand_own_.Uniform(ring_, n), rand_next_.Uniform(ring_, n)};
  return s;
}

}  // namespace obliv1d
