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
#include <span>
#include <utility>
#include <vector>

#include "obliv1d/crypto.h"
#include "obliv1d/ring.h"

namespace obliv1d {

// Representations:
//   kAdditive       x = x_1 + ... + x_n, party i holds x_i.
//   kAuthenticated  additive value fragment plus additive MAC fragment m_i
//                   with sum(m_i) = x * alpha, alpha = sum(alpha_i).
//   kReplicated     three summands; party i holds (x_i, x_{i+1 mod 3}).
enum class Scheme : uint8_t {
  kAdditive = 0,
  kAuthenticated = 1,
  kReplicated = 2,
};

const char* SchemeName(Scheme s);

// One party's shares of a vector of secrets.
//   a: additive fragment, value fragment, or first replicated summand.
//   b: empty, MAC fragment, or second replicated summand.
struct ShareVec {
  Scheme scheme = Scheme::kAdditive;
  Vec a;
  Vec b;

  size_t size() const { return a.size(); }
  bool has_b() const { return scheme != Scheme::kAdditive; }
};

// Local knowledge a party needs for communication-free linear algebra.
struct ShareContext {
  Scheme scheme = Scheme::kAdditive;
  int party = 0;
  int num_parties = 2;
  u128 mac_key_share = 0;
};

ShareVec EmptyShares(Scheme scheme, size_t n = 0);

// Splits each secret into per-party shares. For kAuthenticated the MAC key
// is the sum of mac_key_shares (one per party).
std::vector<ShareVec> Share(const Ring& ring, Scheme scheme,
                            std::span<const u128> secrets, int num_parties,
                            Prg& prg, std::span<const u128> mac_key_shares = {});

// Sums the parties' fragments. Does not verify MACs.
Vec Reconstruct(const Ring& ring, std::span<const ShareVec> shares);

// True when sum(m_i) == x * alpha for every element.
bool MacRelationHolds(const Ring& ring, std::span<const ShareVec> shares,
                      std::span<const u128> mac_key_shares);

ShareVec Add(const Ring& ring, const ShareVec& x, const ShareVec& y);
ShareVec Sub(const Ring& ring, const ShareVec& x, const ShareVec& y);
ShareVec Neg(const Ring& ring, const ShareVec& x);
ShareVec Scale(const Ring& ring, const ShareVec& x, u128 c);
ShareVec ScaleEach(const Ring& ring, const ShareVec& x, std::span<const u128> c);

// Adds public constants. For additive and authenticated shares party 0
// adjusts its value fragment; authenticated MAC fragments gain alpha_i * c.
// For replicated shares the two holders of summand x_1 adjust it.
ShareVec AddPublic(const Ring& ring, const ShareContext& ctx, const ShareVec& x,
                   u128 c);
ShareVec AddPublicEach(const Ring& ring, const ShareContext& ctx,
                       const ShareVec& x, std::span<const u128> c);
// Trivial sharing of public values.
ShareVec Public(const Ring& ring, const ShareContext& ctx,
                std::span<const u128> values);
ShareVec PublicFill(const Ring& ring, const ShareContext& ctx, size_t n,
                    u128 value);

struct LinTerm {
  u128 coeff;
  const ShareVec* share;
};
// sum_j coeff_j * x_j + offset, elementwise.
ShareVec LinComb(const Ring& ring, const ShareContext& ctx,
                 std::span<const LinTerm> terms, u128 offset);

// [[a]] = [[r]] + c where the input owner broadcast c = a - r.
ShareVec InputShare(const Ring& ring, const ShareContext& ctx,
                    const ShareVec& mask, std::span<const u128> c);

ShareVec Slice(const ShareVec& x, size_t begin, size_t count);
ShareVec Concat(std::span<const ShareVec> parts);
ShareVec Gather(const ShareVec& x, std::span<const size_t> index);
void Append(ShareVec& dst, const ShareVec& src);

// Element serialization: scheme tag byte, then the fragments of each
// element in field order.
std::vector<uint8_t> SerializeShares(const Ring& ring, const ShareVec& x);
ShareVec DeserializeShares(const Ring& ring, std::span<const uint8_t> bytes);

}  // namespace obliv1d
