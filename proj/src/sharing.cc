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

#include "obliv1d/sharing.h"

#include <string>

namespace obliv1d {
namespace {

void CheckSame(const ShareVec& x, const ShareVec& y) {
  if (x.scheme != y.scheme) {
    throw UsageError(std::string("mixed share schemes: ") + SchemeName(x.scheme) +
                     " and " + SchemeName(y.scheme));
  }
  if (x.size() != y.size()) throw UsageError("share vectors differ in length");
}

template <typename F>
ShareVec Zip(const ShareVec& x, const ShareVec& y, F f) {
  CheckSame(x, y);
  ShareVec z{x.scheme, Vec(x.size()), Vec(x.b.size())};
  for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = f(x.a[i], y.a[i]);
  for (size_t i = 0; i < x.b.size(); ++i) z.b[i] = f(x.b[i], y.b[i]);
  return z;
}

}  // namespace

const char* SchemeName(Scheme s) {
  switch (s) {
    case Scheme::kAdditive:
      return "additive";
    case Scheme::kAuthenticated:
      return "authenticated";
    case Scheme::kReplicated:
      return "replicated";
  }
  return "?";
}

ShareVec EmptyShares(Scheme scheme, size_t n) {
  ShareVec s{scheme, Vec(n), {}};
  if (scheme != Scheme::kAdditive) s.b.assign(n, 0);
  return s;
}

std::vector<ShareVec> Share(const Ring& ring, Scheme scheme,
                            std::span<const u128> secrets, int num_parties,
                            Prg& prg, std::span<const u128> mac_key_shares) {
  const size_t n = secrets.size();
  if (scheme == Scheme::kReplicated && num_parties != 3) {
    throw UsageError("replicated sharing is defined for three parties");
  }
  if (num_parties < 2) throw UsageError("sharing needs at least two parties");
  std::vector<ShareVec> out(num_parties);
  for (auto& s : out) s = EmptyShares(scheme, n);

  // Additive summands first; every scheme starts from them.
  std::vector<Vec> summands(num_parties, Vec(n));
  for (size_t e = 0; e < n; ++e) {
    u128 acc = 0;
    for (int p = 0; p + 1 < num_parties; ++p) {
      summands[p][e] = prg.Uniform(ring);
      acc = ring.Add(acc, summands[p][e]);
    }
    summands[num_parties - 1][e] = ring.Sub(secrets[e], acc);
  }

  switch (scheme) {
    case Scheme::kAdditive:
      for (int p = 0; p < num_parties; ++p) out[p].a = std::move(summands[p]);
      break;
    case Scheme::kAuthenticated: {
      if (static_cast<int>(mac_key_shares.size()) != num_parties) {
        throw UsageError("authenticated sharing needs one MAC key share per party");
      }
      u128 alpha = 0;
      for (u128 k : mac_key_shares) alpha = ring.Add(alpha, k);
      for (size_t e = 0; e < n; ++e) {
        u128 mac = ring.Mul(secrets[e], alpha);
        u128 acc = 0;
        for (int p = 0; p + 1 < num_parties; ++p) {
          out[p].b[e] = prg.Uniform(ring);
          acc = ring.Add(acc, out[p].b[e]);
        }
        out[num_parties - 1].b[e] = ring.Sub(mac, acc);
      }
      for (int p = 0; p < num_parties; ++p) out[p].a = std::move(summands[p]);
      break;
    }
    case Scheme::kReplicated:
      for (int p = 0; p < 3; ++p) {
        out[p].a = summands[p];
        out[p].b = summands[(p + 1) % 3];
      }
      break;
  }
  return out;
}

Vec Reconstruct(const Ring& ring, std::span<const ShareVec> shares) {
  if (shares.empty()) throw UsageError("no shares to reconstruct");
  for (const auto& s : shares) CheckSame(shares[0], s);
  const size_t n = shares[0].size();
  Vec out(n, 0);
  if (shares[0].scheme == Scheme::kReplicated && shares.size() != 3) {
    throw UsageError("replicated reconstruction needs all three parties");
  }
  for (const auto& s : shares) {
    for (size_t e = 0; e < n; ++e) out[e] = ring.Add(out[e], s.a[e]);
  }
  return out;
}

bool MacRelationHolds(const Ring& ring, std::span<const ShareVec> shares,
                      std::span<const u128> mac_key_shares) {
  Vec x = Reconstruct(ring, shares);
  u128 alpha = 0;
  for (u128 k : mac_key_shares) alpha = ring.Add(alpha, k);
  for (size_t e = 0; e < x.size(); ++e) {
    u128 m = 0;
    for (const auto& s : shares) m = ring.Add(m, s.b[e]);
    if (m != ring.Mul(x[e], alpha)) return false;
  }
  return true;
}

ShareVec Add(const Ring& ring, const ShareVec& x, const ShareVec& y) {
  return Zip(x, y, [&](u128 a, u128 b) { return ring.Add(a, b); });
}

ShareVec Sub(const Ring& ring, const ShareVec& x, const ShareVec& y) {
  return Zip(x, y, [&](u128 a, u128 b) { return ring.Sub(a, b); });
}

ShareVec Neg(const Ring& ring, const ShareVec& x) {
  ShareVec z = x;
  for (auto& v : z.a) v = ring.Neg(v);
  for (auto& v : z.b) v = ring.Neg(v);
  return z;
}

ShareVec Scale(const Ring& ring, const ShareVec& x, u128 c) {
  ShareVec z = x;
  for (auto& v : z.a) v = ring.Mul(v, c);
  for (auto& v : z.b) v = ring.Mul(v, c);
  return z;
}

ShareVec ScaleEach(const Ring& ring, const ShareVec& x, std::span<const u128> c) {
  if (c.size() != x.size()) throw UsageError("constant vector length mismatch");
  ShareVec z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] = ring.Mul(z.a[i], c[i]);
  for (size_t i = 0; i < z.b.size(); ++i) z.b[i] = ring.Mul(z.b[i], c[i]);
  return z;
}

ShareVec AddPublicEach(const Ring& ring, const ShareContext& ctx,
                       const ShareVec& x, std::span<const u128> c) {
  if (c.size() != x.size()) throw UsageError("constant vector length mismatch");
  if (x.scheme != ctx.scheme) throw UsageError("share scheme differs from context");
  ShareVec z = x;
  switch (x.scheme) {
    case Scheme::kAdditive:
      if (ctx.party == 0) {
        for (size_t i = 0; i < c.size(); ++i) z.a[i] = ring.Add(z.a[i], c[i]);
      }
      break;
    case Scheme::kAuthenticated:
      for (size_t i = 0; i < c.size(); ++i) {
        if (ctx.party == 0) z.a[i] = ring.Add(z.a[i], c[i]);
        z.b[i] = ring.Add(z.b[i], ring.Mul(ctx.mac_key_share, c[i]));
      }
      break;
    case Scheme::kReplicated:
      // Summand x_1 is the first component of party 0 and the second
      // component of party 2.
      if (ctx.party == 0) {
        for (size_t i = 0; i < c.size(); ++i) z.a[i] = ring.Add(z.a[i], c[i]);
      } else if (ctx.party == 2) {
        for (size_t i = 0; i < c.size(); ++i) z.b[i] = ring.Add(z.b[i], c[i]);
      }
      break;
  }
  return z;
}

ShareVec AddPublic(const Ring& ring, const ShareContext& ctx, const ShareVec& x,
                   u128 c) {
  Vec cs(x.size(), c);
  return AddPublicEach(ring, ctx, x, cs);
}

ShareVec Public(const Ring& ring, const ShareContext& ctx,
                std::span<const u128> values) {
  return AddPublicEach(ring, ctx, EmptyShares(ctx.scheme, values.size()), values);
}

ShareVec PublicFill(const Ring& ring, const ShareContext& ctx, size_t n,
                    u128 value) {
  Vec v(n, value);
  return Public(ring, ctx, v);
}

ShareVec LinComb(const Ring& ring, const ShareContext& ctx,
                 std::span<const LinTerm> terms, u128 offset) {
  if (terms.empty()) throw UsageError("linear combination needs a term");
  const ShareVec& first = *terms[0].share;
  ShareVec acc = EmptyShares(first.scheme, first.size());
  for (const auto& t : terms) {
    CheckSame(first, *t.share);
    for (size_t i = 0; i < acc.a.size(); ++i) {
      acc.a[i] = ring.Add(acc.a[i], ring.Mul(t.coeff, t.share->a[i]));
    }
    for (size_t i = 0; i < acc.b.size(); ++i) {
      acc.b[i] = ring.Add(acc.b[i], ring.Mul(t.coeff, t.share->b[i]));
    }
  }
  return offset == 0 ? acc : AddPublic(ring, ctx, acc, offset);
}

ShareVec InputShare(const Ring& ring, const ShareContext& ctx,
                    const ShareVec& mask, std::span<const u128> c) {
  return AddPublicEach(ring, ctx, mask, c);
}

ShareVec Slice(const ShareVec& x, size_t begin, size_t count) {
  if (begin + count > x.size()) throw UsageError("slice out of range");
  ShareVec z{x.scheme, Vec(x.a.begin() + begin, x.a.begin() + begin + count), {}};
  if (!x.b.empty()) z.b.assign(x.b.begin() + begin, x.b.begin() + begin + count);
  return z;
}

void Append(ShareVec& dst, const ShareVec& src) {
  if (dst.a.empty() && dst.b.empty()) dst.scheme = src.scheme;
  if (dst.scheme != src.scheme) throw UsageError("mixed share schemes in append");
  dst.a.insert(dst.a.end(), src.a.begin(), src.a.end());
  dst.b.insert(dst.b.end(), src.b.begin(), src.b.end());
}

ShareVec Concat(std::span<const ShareVec> parts) {
  ShareVec z;
  if (!parts.empty()) z.scheme = parts[0].scheme;
  for (const auto& p : parts) Append(z, p);
  return z;
}

ShareVec Gather(const ShareVec& x, std::span<const size_t> index) {
  ShareVec z{x.scheme, Vec(index.size()), {}};
  if (!x.b.empty()) z.b.resize(index.size());
  for (size_t i = 0; i < index.size(); ++i) {
    z.a[i] = x.a.at(index[i]);
    if (!x.b.empty()) z.b[i] = x.b[index[i]];
  }
  return z;
}

std::vector<uint8_t> SerializeShares(const Ring& ring, const ShareVec& x) {
  std::vector<uint8_t> out;
  out.push_back(static_cast<uint8_t>(x.scheme));
  for (size_t i = 0; i < x.size(); ++i) {
    ring.Serialize(std::span<const u128>(&x.a[i], 1), out);
    if (x.has_b()) ring.Serialize(std::span<const u128>(&x.b[i], 1), out);
  }
  return out;
}

ShareVec DeserializeShares(const Ring& ring, std::span<const uint8_t> bytes) {
  if (bytes.empty() || bytes[0] > 2) throw ProtocolError("bad share scheme tag");
  ShareVec x;
  x.scheme = static_cast<Scheme>(bytes[0]);
  Vec all = ring.Deserialize(bytes.subspan(1));
  const size_t per = x.has_b() ? 2 : 1;
  if (all.size() % per) throw ProtocolError("share payload has a dangling fragment");
  for (size_t i = 0; i < all.size(); i += per) {
    x.a.push_back(all[i]);
    if (per == 2) x.b.push_back(all[i + 1]);
  }
  return x;
}

}  // namespace obliv1d
