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

#include "obliv1d/protocols.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace obliv1d {
namespace {

void RequireCompute(const Party& p, const char* what) {
  if (!p.is_compute()) {
    throw UsageError(std::string(what) + " runs on compute nodes only");
  }
}

void CheckLen(const Vec& v, size_t n, int from) {
  if (v.size() != n) {
    throw ProtocolError("node " + std::to_string(from) + " sent " +
                        std::to_string(v.size()) + " elements, expected " +
                        std::to_string(n));
  }
}

// Plain row-major product.
Vec PlainMatMul(const Ring& r, const Vec& x, const Vec& y, size_t m, size_t k,
                size_t n) {
  Vec z(m * n, 0);
  for (size_t i = 0; i < m; ++i) {
    for (size_t t = 0; t < k; ++t) {
      const u128 xv = x[i * k + t];
      if (xv == 0) continue;
      for (size_t j = 0; j < n; ++j) {
        z[i * n + j] = r.Add(z[i * n + j], r.Mul(xv, y[t * n + j]));
      }
    }
  }
  return z;
}

// Public matrix times shared matrix, per fragment.
ShareVec PublicTimesShare(const Ring& r, const Vec& pub, const ShareVec& s, size_t m,
                          size_t k, size_t n) {
  ShareVec z{s.scheme, PlainMatMul(r, pub, s.a, m, k, n), {}};
  if (s.has_b()) z.b = PlainMatMul(r, pub, s.b, m, k, n);
  return z;
}

ShareVec ShareTimesPublic(const Ring& r, const ShareVec& s, const Vec& pub, size_t m,
                          size_t k, size_t n) {
  ShareVec z{s.scheme, PlainMatMul(r, s.a, pub, m, k, n), {}};
  if (s.has_b()) z.b = PlainMatMul(r, s.b, pub, m, k, n);
  return z;
}

Vec AddVec(const Ring& r, const Vec& x, const Vec& y) {
  Vec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = r.Add(x[i], y[i]);
  return z;
}

Vec MulVec(const Ring& r, const Vec& x, const Vec& y) {
  Vec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = r.Mul(x[i], y[i]);
  return z;
}

// Local cross terms x_i*y_i + x_i*y_{i+1} + x_{i+1}*y_i of replicated shares.
Vec AraLocal(const Ring& r, const ShareVec& x, const ShareVec& y) {
  Vec z(x.size());
  for (size_t e = 0; e < x.size(); ++e) {
    z[e] = r.Add(r.Add(r.Mul(x.a[e], y.a[e]), r.Mul(x.a[e], y.b[e])),
                 r.Mul(x.b[e], y.a[e]));
  }
  return z;
}

Vec AraLocalMatMul(const Ring& r, const ShareVec& x, const ShareVec& y, size_t m,
                   size_t k, size_t n) {
  Vec z = PlainMatMul(r, x.a, y.a, m, k, n);
  z = AddVec(r, z, PlainMatMul(r, x.a, y.b, m, k, n));
  return AddVec(r, z, PlainMatMul(r, x.b, y.a, m, k, n));
}

// Turns additive summands z_i (with sum = secret) into replicated shares:
// node i sends z_i to node i-1.
ShareVec Reshare(Party& p, Vec z) {
  const int i = p.node(), next = (i + 1) % 3, prev = (i + 2) % 3;
  const size_t n = z.size();
  p.SendElems(MsgKind::kReshare, prev, z);
  Vec b = p.net().Recv(next);
  CheckLen(b, n, next);
  return ShareVec{Scheme::kReplicated, std::move(z), std::move(b)};
}

Vec AraRandomized(Party& p, Vec z) {
  Vec u = p.prss().Zero(z.size());
  return AddVec(p.ring(), z, u);
}

// Public random ring element agreed by commit-reveal of local seeds.
Prg PublicCoins(Party& p) {
  std::vector<uint8_t> seed(32);
  p.local_prg().Fill(seed);
  auto all = CommitReveal(p.net(), p.info().compute_nodes(), seed, p.local_prg());
  std::vector<uint8_t> cat;
  for (auto& s : all) cat.insert(cat.end(), s.begin(), s.end());
  return Prg(Sha256(cat));
}

ShareVec BeaverCombine(Party& p, const ShareVec& a, const ShareVec& b,
                       const ShareVec& c, const Vec& d, const Vec& e) {
  const Ring& r = p.ring();
  ShareVec z = Add(r, Add(r, c, ScaleEach(r, b, d)), ScaleEach(r, a, e));
  return AddPublicEach(r, p.ctx(), z, MulVec(r, d, e));
}

TripleBatch TakeTriples(Party& p, size_t n) {
  if (p.info().num_parties == 2) return p.pre().Triples(n);
  TripleBatch& pool = p.triple_pool();
  if (pool.a.size() < n) {
    const size_t need = n - pool.a.size();
    TripleBatch fresh = SacrificeTriples(p, std::max(need, p.options().triple_batch));
    if (pool.a.size() == 0) {
      pool = std::move(fresh);
    } else {
      Append(pool.a, fresh.a);
      Append(pool.b, fresh.b);
      Append(pool.c, fresh.c);
    }
  }
  const size_t rest = pool.a.size() - n;
  TripleBatch t{Slice(pool.a, 0, n), Slice(pool.b, 0, n), Slice(pool.c, 0, n)};
  pool = {Slice(pool.a, n, rest), Slice(pool.b, n, rest), Slice(pool.c, n, rest)};
  return t;
}

// sum_i 2^i * bits[offset + i], i < width, as one share.
void ComposeInto(const Ring& r, const ShareVec& bits, size_t offset, int width,
                 u128 scale, ShareVec& out, size_t e) {
  u128 acc_a = 0, acc_b = 0;
  for (int i = width - 1; i >= 0; --i) {
    acc_a = r.Add(r.Add(acc_a, acc_a), bits.a[offset + i]);
    if (bits.has_b()) acc_b = r.Add(r.Add(acc_b, acc_b), bits.b[offset + i]);
  }
  out.a[e] = r.Add(out.a[e], r.Mul(acc_a, scale));
  if (bits.has_b()) out.b[e] = r.Add(out.b[e], r.Mul(acc_b, scale));
}

u128 LowBits(u128 v, int m) { return m >= 128 ? v : v & ((u128{1} << m) - 1); }

// Active 3PC: every server checks that all servers hold the same public
// vector. A server that aborted never confirms, so the others block until
// the session is torn down.
void AgreeOnDigest(Party& p, const Vec& v, const std::string& what) {
  std::vector<uint8_t> bytes;
  p.ring().Serialize(v, bytes);
  AgreeOnBytes(p, bytes, what);
}

}  // namespace

void AgreeOnBytes(Party& p, std::span<const uint8_t> bytes, const std::string& what) {
  Digest d = Sha256(bytes);
  for (int node : p.info().compute_nodes()) {
    if (node != p.node()) p.net().SendBytes(node, MsgType::kEcho, {d.begin(), d.end()});
  }
  for (int node : p.info().compute_nodes()) {
    if (node == p.node()) continue;
    auto got = p.net().RecvBytes(node, MsgType::kEcho);
    if (!std::equal(got.begin(), got.end(), d.begin(), d.end())) {
      throw AbortError(what + " differs between servers");
    }
  }
}

const char* MsgKindName(MsgKind k) {
  switch (k) {
    case MsgKind::kOpen:
      return "open";
    case MsgKind::kBeaver:
      return "beaver";
    case MsgKind::kSacrifice:
      return "sacrifice";
    case MsgKind::kReshare:
      return "reshare";
    case MsgKind::kInput:
      return "input";
    case MsgKind::kOutput:
      return "output";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Party

Party::Party(Network& net, Preprocessing& pre, SchemeCode code, const Key& local_seed,
             PartyOptions opts)
    : net_(net),
      pre_(pre),
      ring_(net.ring()),
      info_(Describe(code)),
      opts_(opts),
      local_prg_(DeriveKey(local_seed, "local:" + std::to_string(net.self()))) {
  CheckSupported(code, ring_);
  if (!(pre.ring() == ring_) || pre.scheme() != code || pre.node() != net.self()) {
    throw UsageError("preprocessing material does not match the session");
  }
  ctx_ = {info_.share_scheme, net.self(), info_.num_parties,
          is_compute() ? pre.MacKeyShare() : 0};
}

void Party::SendElems(MsgKind kind, int to, Vec payload) {
  if (tamper_) tamper_(kind, to, payload);
  net_.Send(to, payload);
}

PrssState& Party::prss() {
  if (!prss_) {
    if (info_.num_parties != 3) throw UsageError("zero-sharing keys exist only in 3PC");
    prss_ = std::make_unique<PrssState>(ring_, pre_.Prss());
  }
  return *prss_;
}

// ---------------------------------------------------------------------------
// Trivial shares

ShareVec Constant(Party& p, size_t n, u128 value) {
  return PublicFill(p.ring(), p.ctx(), n, p.ring().Reduce(value));
}

ShareVec Constants(Party& p, const Vec& values) {
  return Public(p.ring(), p.ctx(), values);
}

ShareVec Broadcast(const ShareVec& x, size_t n) {
  if (x.size() == n) return x;
  if (x.size() != 1) throw UsageError("broadcast needs a single element");
  std::vector<size_t> idx(n, 0);
  return Gather(x, idx);
}

// ---------------------------------------------------------------------------
// Opening

Vec Open(Party& p, const ShareVec& x, MsgKind kind) {
  RequireCompute(p, "open");
  const Ring& r = p.ring();
  const size_t n = x.size();
  if (n == 0) return {};
  Vec v(n);
  if (p.info().num_parties == 2) {
    const int other = 1 - p.node();
    p.SendElems(kind, other, x.a);
    Vec theirs = p.net().Recv(other);
    CheckLen(theirs, n, other);
    for (size_t e = 0; e < n; ++e) v[e] = r.Add(x.a[e], theirs[e]);
    if (x.scheme == Scheme::kAuthenticated) {
      for (size_t e = 0; e < n; ++e) p.pending().push_back({v[e], x.b[e]});
      if (p.options().mac_check == MacCheckMode::kEveryOpen) MacCheckFlush(p);
    }
    return v;
  }
  const int i = p.node(), next = (i + 1) % 3, prev = (i + 2) % 3;
  p.SendElems(kind, next, x.a);
  if (p.info().active) p.SendElems(kind, prev, x.b);
  Vec missing = p.net().Recv(prev);
  CheckLen(missing, n, prev);
  if (p.info().active) {
    Vec copy = p.net().Recv(next);
    CheckLen(copy, n, next);
    if (copy != missing) {
      throw AbortError("inconsistent copies of an opened value (nodes " +
                       std::to_string(prev) + " and " + std::to_string(next) + ")");
    }
  }
  for (size_t e = 0; e < n; ++e) v[e] = r.Add(r.Add(x.a[e], x.b[e]), missing[e]);
  return v;
}

void MacCheckFlush(Party& p) {
  if (p.ctx().scheme != Scheme::kAuthenticated || p.pending().empty()) return;
  const Ring& r = p.ring();
  Prg coeffs = PublicCoins(p);
  u128 sigma = 0;
  const u128 alpha = p.ctx().mac_key_share;
  for (const auto& pc : p.pending()) {
    const u128 residue = r.Sub(pc.mac, r.Mul(alpha, pc.value));
    sigma = r.Add(sigma, r.Mul(coeffs.Uniform(r), residue));
  }
  p.pending().clear();
  std::vector<uint8_t> mine;
  r.Serialize(std::span<const u128>(&sigma, 1), mine);
  auto all = CommitReveal(p.net(), p.info().compute_nodes(), mine, p.local_prg());
  u128 total = 0;
  for (auto& s : all) {
    Vec v = r.Deserialize(s);
    if (v.size() != 1) throw AbortError("malformed MAC check contribution");
    total = r.Add(total, v[0]);
  }
  if (total != 0) throw AbortError("MAC check failed: an opened value was altered");
}

// ---------------------------------------------------------------------------
// Multiplication

ShareVec Mul(Party& p, const ShareVec& x, const ShareVec& y) {
  RequireCompute(p, "mul");
  if (x.size() != y.size()) throw UsageError("mul operands differ in length");
  const Ring& r = p.ring();
  const size_t n = x.size();
  if (n == 0) return EmptyShares(p.ctx().scheme, 0);
  if (p.ctx().scheme == Scheme::kReplicated && !p.info().active) {
    return Reshare(p, AraRandomized(p, AraLocal(r, x, y)));
  }
  TripleBatch t = TakeTriples(p, n);
  ShareVec parts[] = {Sub(r, x, t.a), Sub(r, y, t.b)};
  Vec de = Open(p, Concat(parts), MsgKind::kBeaver);
  Vec d(de.begin(), de.begin() + n), e(de.begin() + n, de.end());
  return BeaverCombine(p, t.a, t.b, t.c, d, e);
}

ShareVec MatMul(Party& p, const ShareVec& x, const ShareVec& y, size_t m, size_t k,
                size_t n) {
  RequireCompute(p, "matmul");
  if (x.size() != m * k || y.size() != k * n) {
    throw UsageError("matmul shape mismatch");
  }
  const Ring& r = p.ring();
  if (p.ctx().scheme == Scheme::kReplicated && !p.info().active) {
    return Reshare(p, AraRandomized(p, AraLocalMatMul(r, x, y, m, k, n)));
  }
  MatrixTriple t;
  if (p.info().num_parties == 3) {
    t = SacrificeMatrixTriple(p, m, k, n);
  } else if (p.pre().HasMatrixTriples()) {
    t = p.pre().MatrixTriples(m, k, n);
  } else {
    // Scalar fallback: one triple per product term.
    std::vector<size_t> xi, yi;
    xi.reserve(m * n * k);
    yi.reserve(m * n * k);
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < n; ++j) {
        for (size_t q = 0; q < k; ++q) {
          xi.push_back(i * k + q);
          yi.push_back(q * n + j);
        }
      }
    }
    ShareVec prod = Mul(p, Gather(x, xi), Gather(y, yi));
    ShareVec z = EmptyShares(prod.scheme, m * n);
    for (size_t o = 0; o < m * n; ++o) {
      for (size_t q = 0; q < k; ++q) {
        z.a[o] = r.Add(z.a[o], prod.a[o * k + q]);
        if (z.has_b()) z.b[o] = r.Add(z.b[o], prod.b[o * k + q]);
      }
    }
    return z;
  }
  ShareVec parts[] = {Sub(r, x, t.a), Sub(r, y, t.b)};
  Vec ed = Open(p, Concat(parts), MsgKind::kBeaver);
  Vec eps(ed.begin(), ed.begin() + m * k), del(ed.begin() + m * k, ed.end());
  ShareVec z = Add(r, t.c, PublicTimesShare(r, eps, t.b, m, k, n));
  z = Add(r, z, ShareTimesPublic(r, t.a, del, m, k, n));
  return AddPublicEach(r, p.ctx(), z, PlainMatMul(r, eps, del, m, k, n));
}

TripleBatch SacrificeTriples(Party& p, size_t n) {
  RequireCompute(p, "sacrifice");
  const Ring& r = p.ring();
  PrssState& prss = p.prss();
  ShareVec a = prss.Random(n), b = prss.Random(n);
  ShareVec a2 = prss.Random(n), b2 = prss.Random(n);
  Vec z = AraLocal(r, a, b);
  Vec z2 = AraLocal(r, a2, b2);
  z.insert(z.end(), z2.begin(), z2.end());
  ShareVec cc = Reshare(p, AraRandomized(p, std::move(z)));
  ShareVec c = Slice(cc, 0, n), c2 = Slice(cc, n, n);

  const u128 rho = PublicCoins(p).Uniform(r);
  ShareVec parts[] = {Sub(r, Scale(r, a, rho), a2), Sub(r, b, b2)};
  Vec ed = Open(p, Concat(parts), MsgKind::kSacrifice);
  Vec eps(ed.begin(), ed.begin() + n), del(ed.begin() + n, ed.end());
  // rho*c - c' - eps*b' - a'*delta - eps*delta must open to zero.
  ShareVec chk = Sub(r, Scale(r, c, rho), c2);
  chk = Sub(r, chk, ScaleEach(r, b2, eps));
  chk = Sub(r, chk, ScaleEach(r, a2, del));
  Vec ed_prod = MulVec(r, eps, del);
  for (auto& v : ed_prod) v = r.Neg(v);
  chk = AddPublicEach(r, p.ctx(), chk, ed_prod);
  Vec opened = Open(p, chk, MsgKind::kSacrifice);
  for (u128 v : opened) {
    if (v != 0) throw AbortError("triple sacrifice check failed");
  }
  return {std::move(a), std::move(b), std::move(c)};
}

MatrixTriple SacrificeMatrixTriple(Party& p, size_t m, size_t k, size_t n) {
  RequireCompute(p, "sacrifice");
  const Ring& r = p.ring();
  PrssState& prss = p.prss();
  ShareVec a = prss.Random(m * k), b = prss.Random(k * n);
  ShareVec a2 = prss.Random(m * k), b2 = prss.Random(k * n);
  Vec z = AraLocalMatMul(r, a, b, m, k, n);
  Vec z2 = AraLocalMatMul(r, a2, b2, m, k, n);
  z.insert(z.end(), z2.begin(), z2.end());
  ShareVec cc = Reshare(p, AraRandomized(p, std::move(z)));
  ShareVec c = Slice(cc, 0, m * n), c2 = Slice(cc, m * n, m * n);

  const u128 rho = PublicCoins(p).Uniform(r);
  ShareVec parts[] = {Sub(r, Scale(r, a, rho), a2), Sub(r, b, b2)};
  Vec ed = Open(p, Concat(parts), MsgKind::kSacrifice);
  Vec eps(ed.begin(), ed.begin() + m * k), del(ed.begin() + m * k, ed.end());
  ShareVec chk = Sub(r, Scale(r, c, rho), c2);
  chk = Sub(r, chk, PublicTimesShare(r, eps, b2, m, k, n));
  chk = Sub(r, chk, ShareTimesPublic(r, a2, del, m, k, n));
  Vec ed_prod = PlainMatMul(r, eps, del, m, k, n);
  for (auto& v : ed_prod) v = r.Neg(v);
  chk = AddPublicEach(r, p.ctx(), chk, ed_prod);
  Vec opened = Open(p, chk, MsgKind::kSacrifice);
  for (u128 v : opened) {
    if (v != 0) throw AbortError("matrix triple sacrifice check failed");
  }
  return {m, k, n, std::move(a), std::move(b), std::move(c)};
}

// ---------------------------------------------------------------------------
// Comparison

ShareVec BitLT(Party& p, const Vec& a, const ShareVec& bits,
               const std::vector<int>& widths) {
  RequireCompute(p, "bitlt");
  const Ring& r = p.ring();
  const size_t count = a.size();
  if (widths.size() != count) throw UsageError("bitlt widths/instances mismatch");
  std::vector<size_t> off(count + 1, 0);
  for (size_t e = 0; e < count; ++e) {
    off[e + 1] = off[e] + widths[e];
    if (widths[e] < 128 && (a[e] >> widths[e]) != 0) {
      throw UsageError("bitlt public operand wider than its bit width");
    }
  }
  if (bits.size() != off[count]) throw UsageError("bitlt bit count mismatch");

  // Per bit: lt_i = [a_i < b_i] = (1 - a_i) b_i and eq_i = 1 - (a_i XOR b_i),
  // both linear in b_i.
  const size_t total = off[count];
  Vec lt_coeff(total), eq_coeff(total), eq_shift(total);
  for (size_t e = 0; e < count; ++e) {
    for (int i = 0; i < widths[e]; ++i) {
      const bool ai = (a[e] >> i) & 1;
      lt_coeff[off[e] + i] = ai ? 0 : 1;
      eq_coeff[off[e] + i] = ai ? 1 : r.Neg(1);
      eq_shift[off[e] + i] = ai ? 0 : 1;
    }
  }
  ShareVec lt = ScaleEach(r, bits, lt_coeff);
  ShareVec eq = AddPublicEach(r, p.ctx(), ScaleEach(r, bits, eq_coeff), eq_shift);

  // Pairwise merge from LSB groups upward: (lt, eq) of a high group over a
  // low one is (lt_hi + eq_hi lt_lo, eq_hi eq_lo). Groups of an instance
  // stay consecutive; an odd top group passes through.
  std::vector<size_t> groups(widths.begin(), widths.end());
  std::vector<size_t> start(count + 1, 0);
  for (size_t e = 0; e < count; ++e) start[e + 1] = start[e] + groups[e];
  while (true) {
    std::vector<size_t> lo, hi, pass;
    std::vector<size_t> next_groups(count);
    // Output slot of every merged pair and passed-through group, in order.
    std::vector<std::pair<bool, size_t>> order;
    for (size_t e = 0; e < count; ++e) {
      const size_t k = groups[e];
      for (size_t j = 0; j + 1 < k; j += 2) {
        order.push_back({true, lo.size()});
        lo.push_back(start[e] + j);
        hi.push_back(start[e] + j + 1);
      }
      if (k % 2 == 1) {
        order.push_back({false, pass.size()});
        pass.push_back(start[e] + k - 1);
      }
      next_groups[e] = (k + 1) / 2;
    }
    if (lo.empty()) break;
    ShareVec eq_hi = Gather(eq, hi);
    ShareVec z = Mul(p, Concat(std::vector<ShareVec>{eq_hi, eq_hi}),
                     Concat(std::vector<ShareVec>{Gather(lt, lo), Gather(eq, lo)}));
    const size_t m = lo.size();
    ShareVec new_lt = Add(r, Gather(lt, hi), Slice(z, 0, m));
    ShareVec new_eq = Slice(z, m, m);
    ShareVec pass_lt = Gather(lt, pass), pass_eq = Gather(eq, pass);
    ShareVec next_lt = EmptyShares(lt.scheme, order.size());
    ShareVec next_eq = EmptyShares(eq.scheme, order.size());
    for (size_t t = 0; t < order.size(); ++t) {
      const auto [merged, i] = order[t];
      const ShareVec& sl = merged ? new_lt : pass_lt;
      const ShareVec& se = merged ? new_eq : pass_eq;
      next_lt.a[t] = sl.a[i];
      next_eq.a[t] = se.a[i];
      if (lt.has_b()) {
        next_lt.b[t] = sl.b[i];
        next_eq.b[t] = se.b[i];
      }
    }
    lt = std::move(next_lt);
    eq = std::move(next_eq);
    groups = std::move(next_groups);
    for (size_t e = 0; e < count; ++e) start[e + 1] = start[e] + groups[e];
  }
  return lt;
}

ShareVec Trunc(Party& p, const ShareVec& x, int m, int bits, TruncMode mode) {
  RequireCompute(p, "trunc");
  const Ring& r = p.ring();
  const size_t n = x.size();
  if (m == 0) return x;
  if (m < 0 || m >= bits) throw UsageError("truncation shift out of range");
  if (n == 0) return x;
  const bool exact = mode == TruncMode::kDeterministic;
  const int L = r.bit_length();
  const int kappa = r.stat_sec();
  const u128 half = u128{1} << (bits - 1);
  const u128 bias_out = u128{1} << (bits - 1 - m);
  Preprocessing& pre = p.pre();
  ShareVec y = AddPublic(r, p.ctx(), x, half);

  if (r.is_prime() && bits + kappa + 1 <= L - 1) {
    // Statistical masking: y + r never wraps around p.
    ShareVec low_bits, r_low;
    if (exact) {
      low_bits = pre.Bits(n * m);
      r_low = EmptyShares(low_bits.scheme, n);
      for (size_t e = 0; e < n; ++e) ComposeInto(r, low_bits, e * m, m, 1, r_low, e);
    } else {
      r_low = pre.Bounded(m, n);
    }
    ShareVec r_high = pre.Bounded(bits + kappa - m, n);
    ShareVec mask = Add(r, r_low, Scale(r, r_high, r.Pow2(m)));
    Vec c = Open(p, Add(r, y, mask));
    ShareVec h = Neg(r, r_high);
    if (exact) {
      Vec c_low(n);
      for (size_t e = 0; e < n; ++e) c_low[e] = LowBits(c[e], m);
      h = Sub(r, h, BitLT(p, c_low, low_bits, std::vector<int>(n, m)));
    }
    Vec pub(n);
    for (size_t e = 0; e < n; ++e) pub[e] = r.Sub(c[e] >> m, bias_out);
    return AddPublicEach(r, p.ctx(), h, pub);
  }

  if (r.is_prime()) {
    if (bits >= L || (u128{1} << bits) > r.modulus()) {
      throw RangeError("truncation input of " + std::to_string(bits) +
                       " bits does not fit the field");
    }
    // Full-range masking: r uniform below p with all bits shared; the wrap
    // bit w = [c < r] selects between the candidates from c and c + p.
    ShareVec fb = pre.FieldBits(n);
    ShareVec mask = EmptyShares(fb.scheme, n), r_high = EmptyShares(fb.scheme, n);
    for (size_t e = 0; e < n; ++e) {
      ComposeInto(r, fb, e * L, L, 1, mask, e);
      ComposeInto(r, fb, e * L + m, L - m, 1, r_high, e);
    }
    Vec c = Open(p, Add(r, y, mask));
    const u128 q = r.modulus();
    Vec a_vals;
    std::vector<int> widths;
    std::vector<size_t> idx;
    for (size_t e = 0; e < n; ++e) {
      a_vals.push_back(c[e]);
      widths.push_back(L);
      for (int i = 0; i < L; ++i) idx.push_back(e * L + i);
    }
    if (exact) {
      for (int variant = 0; variant < 2; ++variant) {
        for (size_t e = 0; e < n; ++e) {
          a_vals.push_back(LowBits(c[e] + (variant ? q : 0), m));
          widths.push_back(m);
          for (int i = 0; i < m; ++i) idx.push_back(e * L + i);
        }
      }
    }
    ShareVec lt = BitLT(p, a_vals, Gather(fb, idx), widths);
    ShareVec w = Slice(lt, 0, n);
    // h0 = (c >> m) - r_high - u0, h1 = ((c + p) >> m) - r_high - u1.
    Vec h0_pub(n), step(n);
    for (size_t e = 0; e < n; ++e) {
      h0_pub[e] = r.Sub(r.Reduce(c[e] >> m), bias_out);
      step[e] = r.Sub(r.Reduce((c[e] + q) >> m), r.Reduce(c[e] >> m));
    }
    ShareVec h0 = AddPublicEach(r, p.ctx(), Neg(r, r_high), h0_pub);
    ShareVec delta_w;
    if (exact) {
      ShareVec u0 = Slice(lt, n, n), u1 = Slice(lt, 2 * n, n);
      h0 = Sub(r, h0, u0);
      ShareVec diff = AddPublicEach(r, p.ctx(), Sub(r, u0, u1), step);
      delta_w = Mul(p, w, diff);
    } else {
      delta_w = ScaleEach(r, w, step);
    }
    return Add(r, h0, delta_w);
  }

  // Z_2^k: r uniform over the ring with its top bit shared separately.
  const int k = L;
  if (bits > k - 1) {
    throw RangeError("truncation input of " + std::to_string(bits) +
                     " bits does not fit Z_2^" + std::to_string(k));
  }
  ShareVec low_bits, r_low;
  if (exact) {
    low_bits = pre.Bits(n * m);
    r_low = EmptyShares(low_bits.scheme, n);
    for (size_t e = 0; e < n; ++e) ComposeInto(r, low_bits, e * m, m, 1, r_low, e);
  } else {
    r_low = pre.Bounded(m, n);
  }
  ShareVec r_mid = pre.Bounded(k - 1 - m, n);
  ShareVec r_msb = pre.Bits(n);
  ShareVec mask = Add(r, r_low, Scale(r, r_mid, r.Pow2(m)));
  mask = Add(r, mask, Scale(r, r_msb, r.Pow2(k - 1)));
  Vec c = Open(p, Add(r, y, mask));
  // Overflow of the low k-1 bits: v = c_msb XOR r_msb.
  Vec v_coeff(n), v_off(n), pub(n);
  for (size_t e = 0; e < n; ++e) {
    const bool cm = (c[e] >> (k - 1)) & 1;
    v_coeff[e] = cm ? r.Neg(1) : 1;
    v_off[e] = cm ? 1 : 0;
    const u128 c_rest = LowBits(c[e], k - 1);
    pub[e] = r.Sub(c_rest >> m, bias_out);
  }
  ShareVec v = AddPublicEach(r, p.ctx(), ScaleEach(r, r_msb, v_coeff), v_off);
  ShareVec h = Sub(r, Scale(r, v, r.Pow2(k - 1 - m)), r_mid);
  if (exact) {
    Vec c_low(n);
    for (size_t e = 0; e < n; ++e) c_low[e] = LowBits(c[e], m);
    h = Sub(r, h, BitLT(p, c_low, low_bits, std::vector<int>(n, m)));
  }
  return AddPublicEach(r, p.ctx(), h, pub);
}

ShareVec TruncSecret(Party& p, const ShareVec& x, const ShareVec& shift, int bits,
                     int n_max, TruncMode mode) {
  RequireCompute(p, "trunc_secret");
  const Ring& r = p.ring();
  if (shift.size() != 1) throw UsageError("secret shift must be a single element");
  // One-hot of the shift, then 2^(n_max - n) as a shared multiplier.
  ShareVec cands = Broadcast(shift, n_max + 1);
  Vec minus_j(n_max + 1);
  for (int j = 0; j <= n_max; ++j) minus_j[j] = r.Neg(j);
  ShareVec hot = Eqz(p, AddPublicEach(r, p.ctx(), cands, minus_j));
  Vec pw(n_max + 1);
  for (int j = 0; j <= n_max; ++j) pw[j] = r.Pow2(n_max - j);
  ShareVec scaled = ScaleEach(r, hot, pw);
  ShareVec pow = EmptyShares(scaled.scheme, 1);
  for (int j = 0; j <= n_max; ++j) {
    pow.a[0] = r.Add(pow.a[0], scaled.a[j]);
    if (pow.has_b()) pow.b[0] = r.Add(pow.b[0], scaled.b[j]);
  }
  ShareVec y = Mul(p, x, Broadcast(pow, x.size()));
  return Trunc(p, y, n_max, bits + n_max, mode);
}

ShareVec Ltz(Party& p, const ShareVec& x) {
  const int l = p.ring().value_bits();
  return Neg(p.ring(), TruncDet(p, x, l - 1, l));
}

ShareVec Eqz(Party& p, const ShareVec& x) {
  const Ring& r = p.ring();
  const size_t n = x.size();
  ShareVec both[] = {x, Neg(r, x)};
  ShareVec l = Ltz(p, Concat(both));
  ShareVec s = Add(r, Slice(l, 0, n), Slice(l, n, n));
  return AddPublic(r, p.ctx(), Neg(r, s), 1);
}

ShareVec Select(Party& p, const ShareVec& b, const ShareVec& x, const ShareVec& y) {
  const Ring& r = p.ring();
  return Add(r, y, Mul(p, b, Sub(r, x, y)));
}

ShareVec ReluThreshold(Party& p, const ShareVec& x, const ShareVec& t) {
  const Ring& r = p.ring();
  ShareVec tt = Broadcast(t, x.size());
  return Select(p, Ltz(p, Sub(r, x, tt)), tt, x);
}

ArgmaxResult Argmax(Party& p, const ShareVec& x, size_t groups) {
  RequireCompute(p, "argmax");
  const Ring& r = p.ring();
  if (groups == 0 || x.size() == 0 || x.size() % groups) {
    throw UsageError("argmax needs a non-empty vector per group");
  }
  const size_t len = x.size() / groups;
  Vec idx(x.size());
  for (size_t g = 0; g < groups; ++g) {
    for (size_t j = 0; j < len; ++j) idx[g * len + j] = j;
  }
  ShareVec val = x, ind = Constants(p, idx);
  size_t cur = len;
  while (cur > 1) {
    const size_t half = cur / 2;
    std::vector<size_t> left, right, carry;
    for (size_t g = 0; g < groups; ++g) {
      for (size_t i = 0; i < half; ++i) {
        left.push_back(g * cur + 2 * i);
        right.push_back(g * cur + 2 * i + 1);
      }
    }
    ShareVec lv = Gather(val, left), rv = Gather(val, right);
    ShareVec li = Gather(ind, left), ri = Gather(ind, right);
    // Right wins only when strictly larger, so ties keep the lower index.
    ShareVec c = Ltz(p, Sub(r, lv, rv));
    ShareVec cc[] = {c, c};
    ShareVec dd[] = {Sub(r, rv, lv), Sub(r, ri, li)};
    ShareVec prod = Mul(p, Concat(cc), Concat(dd));
    const size_t np = left.size();
    ShareVec wv = Add(r, lv, Slice(prod, 0, np));
    ShareVec wi = Add(r, li, Slice(prod, np, np));
    const size_t next = half + (cur % 2);
    ShareVec nv = EmptyShares(val.scheme, 0), ni = EmptyShares(val.scheme, 0);
    for (size_t g = 0; g < groups; ++g) {
      Append(nv, Slice(wv, g * half, half));
      Append(ni, Slice(wi, g * half, half));
      if (cur % 2) {
        Append(nv, Slice(val, g * cur + cur - 1, 1));
        Append(ni, Slice(ind, g * cur + cur - 1, 1));
      }
    }
    val = std::move(nv);
    ind = std::move(ni);
    cur = next;
  }
  return {std::move(ind), std::move(val)};
}

// ---------------------------------------------------------------------------
// Fixed point

ShareVec FixMul(Party& p, const ShareVec& x, const ShareVec& y, int f, int bits) {
  const Ring& r = p.ring();
  ShareVec z = Mul(p, x, y);
  if (f == 0) return z;
  return TruncDet(p, AddPublic(r, p.ctx(), z, r.Pow2(f - 1)), f, bits);
}

namespace {
constexpr int kDivGuardBits = 4;
}  // namespace

ShareVec DivSecret(Party& p, const ShareVec& num, const ShareVec& den_in, int f,
                   int d_max) {
  RequireCompute(p, "div_secret");
  const Ring& r = p.ring();
  const size_t n = num.size();
  const int l = r.value_bits();
  ShareVec den = Broadcast(den_in, n);
  int K = 1;
  while ((int64_t{1} << K) <= d_max) ++K;
  if (f < K) throw UsageError("too few fractional bits for the divisor range");

  // g_j = [den < 2^j]; the bit length k of den sets s = 2^(f-k).
  ShareVec probes = EmptyShares(den.scheme, 0);
  for (int j = 1; j < K; ++j) {
    Append(probes, AddPublic(r, p.ctx(), den, r.Neg(r.Pow2(j))));
  }
  ShareVec s = Constant(p, n, r.Pow2(f - K));
  if (K > 1) {
    ShareVec g = Ltz(p, probes);
    for (int j = 1; j < K; ++j) {
      s = Add(r, s, Scale(r, Slice(g, (j - 1) * n, n), r.Pow2(f - j - 1)));
    }
  }
  // Internal precision fi = f + guard bits.
  const int g = kDivGuardBits, fi = f + g;
  const int wide = std::min(r.bit_length() - 1, l + fi + g + 2);
  ShareVec ds[] = {den, num};
  ShareVec ss[] = {Scale(r, s, r.Pow2(g)), Scale(r, s, r.Pow2(g))};
  ShareVec prod = Mul(p, Concat(ds), Concat(ss));
  // d' = den * 2^(fi-k) in [0.5, 1); n' = num * 2^(fi-k) rescaled to fi bits.
  ShareVec d = Slice(prod, 0, n);
  ShareVec nn = Slice(prod, n, n);
  nn = TruncDet(p, AddPublic(r, p.ctx(), nn, r.Pow2(f - 1)), f, wide);

  // w0 = 2.9142 - 2 d'.
  const u128 c0 = r.FromSigned(static_cast<i128>(2.9142 * std::ldexp(1.0, fi) + 0.5));
  ShareVec w = AddPublic(r, p.ctx(), Neg(r, Scale(r, d, 2)), c0);
  int iters = 1;
  while ((1 << (iters - 1)) < f + 1) ++iters;  // ceil(log2(f + 1)) + 1
  ShareVec nd[] = {nn, d};
  ShareVec ww[] = {w, w};
  ShareVec cur = FixMul(p, Concat(nd), Concat(ww), fi, wide);
  for (int it = 1; it < iters; ++it) {
    ShareVec dcur = Slice(cur, n, n);
    ShareVec e = AddPublic(r, p.ctx(), Neg(r, dcur), r.Pow2(fi + 1));
    ShareVec ee[] = {e, e};
    cur = FixMul(p, cur, Concat(ee), fi, wide);
  }
  ShareVec q = Slice(cur, 0, n);
  return TruncDet(p, AddPublic(r, p.ctx(), q, r.Pow2(g - 1)), g, wide);
}

ShareVec MulPublicFrac(Party& p, const ShareVec& x, uint64_t divisor, int bits) {
  if (divisor == 0) throw UsageError("public divisor must be positive");
  const Ring& r = p.ring();
  const u128 c = ((u128{1} << kPublicFracBits) + divisor / 2) / divisor;
  return TruncDet(p, Scale(r, x, c), kPublicFracBits, bits + kPublicFracBits);
}

// ---------------------------------------------------------------------------
// Inputs and outputs

ShareVec InputFrom(Party& p, int owner, size_t n, const Vec* values) {
  const Ring& r = p.ring();
  const SchemeInfo& info = p.info();
  if (!p.is_compute() && p.node() != owner) return EmptyShares(p.ctx().scheme, 0);
  MaskBatch mask = p.pre().Masks(owner, n);
  Vec c;
  if (p.node() == owner) {
    if (!values || values->size() != n) throw UsageError("input owner must supply values");
    c.resize(n);
    for (size_t e = 0; e < n; ++e) c[e] = r.Sub(r.Reduce((*values)[e]), mask.plain[e]);
    for (int node : info.compute_nodes()) {
      if (node != owner) p.SendElems(MsgKind::kInput, node, c);
    }
    if (!p.is_compute()) return EmptyShares(p.ctx().scheme, 0);
  } else {
    RequireCompute(p, "input");
    c = p.net().Recv(owner);
    CheckLen(c, n, owner);
  }
  if (info.active && info.num_parties == 3) {
    // Servers compare digests so the owner cannot send diverging values.
    AgreeOnDigest(p, c, "input of node " + std::to_string(owner));
  }
  return InputShare(r, p.ctx(), mask.shares, c);
}

Vec RevealTo(Party& p, int target, const ShareVec& y, size_t n) {
  const Ring& r = p.ring();
  const SchemeInfo& info = p.info();
  if (p.is_compute()) {
    n = y.size();
    MaskBatch mask = p.pre().Masks(target, n);
    Vec z = Open(p, Add(r, y, mask.shares), MsgKind::kOutput);
    MacCheckFlush(p);
    if (info.active && info.num_parties == 3) AgreeOnDigest(p, z, "masked output");
    if (info.is_compute(target)) {
      if (p.node() != target) return {};
      for (size_t e = 0; e < n; ++e) z[e] = r.Sub(z[e], mask.plain[e]);
      return z;
    }
    p.SendElems(MsgKind::kOutput, target, z);
    return {};
  }
  if (p.node() != target) return {};
  MaskBatch mask = p.pre().Masks(target, n);
  Vec z;
  for (int node : info.compute_nodes()) {
    Vec got = p.net().Recv(node);
    CheckLen(got, n, node);
    if (z.empty()) {
      z = std::move(got);
    } else if (got != z) {
      throw AbortError("compute nodes delivered different outputs");
    }
  }
  for (size_t e = 0; e < n; ++e) z[e] = r.Sub(z[e], mask.plain[e]);
  return z;
}

}  // namespace obliv1d
