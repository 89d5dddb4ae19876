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

#include "obliv1d/ring.h"

#include <algorithm>
#include <cmath>

namespace obliv1d {
namespace {

uint64_t MulMod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>((u128{a} * b) % m);
}

uint64_t PowMod(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = MulMod(r, b, m);
    b = MulMod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

// Deterministic Miller-Rabin; these bases are sufficient for n < 2^64.
bool IsPrime64(uint64_t n) {
  if (n < 2) return false;
  static constexpr uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : kBases) {
    uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Ring Ring::Prime64(uint64_t p, int frac_bits, int value_bits, int stat_sec) {
  Ring r;
  r.kind_ = RingKind::kPrime64;
  r.modulus_ = p;
  r.mask_ = 0;
  r.k_ = p == 0 ? 0 : 64 - __builtin_clzll(p);
  r.frac_bits_ = frac_bits;
  r.value_bits_ = value_bits;
  r.stat_sec_ = stat_sec;
  r.Validate();
  return r;
}

Ring Ring::Mod2k(int k, int frac_bits, int value_bits, int stat_sec) {
  Ring r;
  r.kind_ = RingKind::kMod2k;
  if (k < 2 || k > 127) throw UsageError("Mod2k requires 2 <= k <= 127");
  r.k_ = k;
  r.modulus_ = u128{1} << k;
  r.mask_ = r.modulus_ - 1;
  r.frac_bits_ = frac_bits;
  r.value_bits_ = value_bits;
  r.stat_sec_ = stat_sec;
  r.Validate();
  return r;
}

void Ring::Validate() const {
  if (is_prime()) {
    if (modulus_ >> 64) throw UsageError("prime modulus exceeds 64 bits");
    if (!IsPrime64(static_cast<uint64_t>(modulus_))) {
      throw UsageError("Prime64 modulus is not prime");
    }
  }
  if (value_bits_ < 2 || stat_sec_ < 0 ||
      value_bits_ + stat_sec_ > bit_length()) {
    throw UsageError("ring requires value_bits + stat_sec <= bit length");
  }
  if (frac_bits_ < 0 || frac_bits_ >= value_bits_) {
    throw UsageError("ring requires 0 <= frac_bits < value_bits");
  }
}

u128 Ring::FromSigned(i128 v) const {
  if (is_prime()) {
    i128 m = static_cast<i128>(modulus_);
    i128 r = v % m;
    if (r < 0) r += m;
    return static_cast<u128>(r);
  }
  return static_cast<u128>(v) & mask_;
}

i128 Ring::ToSigned(u128 a) const {
  if (is_prime()) {
    return a <= (modulus_ - 1) / 2 ? static_cast<i128>(a)
                                   : static_cast<i128>(a) -
                                         static_cast<i128>(modulus_);
  }
  return a < (modulus_ >> 1) ? static_cast<i128>(a)
                             : static_cast<i128>(a) -
                                   static_cast<i128>(modulus_);
}

u128 Ring::EncodeFixed(double v, int f) const {
  long double scaled = std::round(static_cast<long double>(v) *
                                  std::ldexp(1.0L, f));
  long double bound = std::ldexp(1.0L, value_bits_ - 1);
  if (!(std::fabs(scaled) < bound)) {
    throw RangeError("fixed-point value " + std::to_string(v) +
                     " overflows " + std::to_string(value_bits_) + " bits");
  }
  return FromSigned(static_cast<i128>(scaled));
}

double Ring::DecodeFixed(u128 a, int f) const {
  return static_cast<double>(std::ldexp(
      static_cast<long double>(ToSigned(a)), -f));
}

void Ring::Serialize(std::span<const u128> elems,
                     std::vector<uint8_t>& out) const {
  const size_t w = element_bytes();
  size_t base = out.size();
  out.resize(base + elems.size() * w);
  uint8_t* p = out.data() + base;
  for (u128 v : elems) {
    for (size_t i = 0; i < w; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
    p += w;
  }
}

Vec Ring::Deserialize(std::span<const uint8_t> bytes) const {
  const size_t w = element_bytes();
  if (bytes.size() % w != 0) {
    throw ProtocolError("element payload is not a multiple of " +
                        std::to_string(w) + " bytes");
  }
  Vec out(bytes.size() / w);
  for (size_t e = 0; e < out.size(); ++e) {
    u128 v = 0;
    for (size_t i = 0; i < w; ++i) v |= u128{bytes[e * w + i]} << (8 * i);
    if (v >= modulus_) throw ProtocolError("element out of range");
    out[e] = v;
  }
  return out;
}

std::vector<uint8_t> Ring::DescriptorBytes() const {
  std::vector<uint8_t> b;
  b.push_back(static_cast<uint8_t>(kind_));
  u128 param = is_prime() ? modulus_ : static_cast<u128>(k_);
  for (int i = 0; i < 16; ++i) b.push_back(static_cast<uint8_t>(param >> (8 * i)));
  b.push_back(static_cast<uint8_t>(frac_bits_));
  b.push_back(static_cast<uint8_t>(value_bits_));
  b.push_back(static_cast<uint8_t>(stat_sec_));
  return b;
}

Ring Ring::FromDescriptorBytes(std::span<const uint8_t> b) {
  if (b.size() != 20) throw ProtocolError("bad ring descriptor length");
  u128 param = 0;
  for (int i = 0; i < 16; ++i) param |= u128{b[1 + i]} << (8 * i);
  int f = b[17], l = b[18], s = b[19];
  try {
    switch (b[0]) {
      case 0:
        if (param >> 64) throw UsageError("prime too large");
        return Prime64(static_cast<uint64_t>(param), f, l, s);
      case 1:
        return Mod2k(static_cast<int>(param), f, l, s);
      default:
        break;
    }
  } catch (const UsageError& e) {
    throw ProtocolError(std::string("invalid ring descriptor: ") + e.what());
  }
  throw ProtocolError("unknown ring kind");
}

std::string Ring::Name() const {
  return is_prime() ? "prime64" : "mod2k(" + std::to_string(k_) + ")";
}

RingElement RingArith(const RingElement& a, const RingElement& b, ArithOp op) {
  if (!(a.ring == b.ring)) {
    throw DescriptorMismatch("operands belong to different rings: " +
                             a.ring.Name() + " vs " + b.ring.Name());
  }
  const Ring& r = a.ring;
  switch (op) {
    case ArithOp::kAdd:
      return {r, r.Add(a.value, b.value)};
    case ArithOp::kSub:
      return {r, r.Sub(a.value, b.value)};
    case ArithOp::kMul:
      return {r, r.Mul(a.value, b.value)};
  }
  return {r, 0};
}

i128 SignedLift(const RingElement& a) { return a.ring.ToSigned(a.value); }

std::string ToString(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::string ToString(i128 v) {
  if (v < 0) return "-" + ToString(static_cast<u128>(-v));
  return ToString(static_cast<u128>(v));
}

bool ParseU128(std::string_view s, u128& out) {
  if (s.empty() || s.size() > 39) return false;
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    u128 next = v * 10 + static_cast<unsigned>(c - '0');
    if (next / 10 != v) return false;
    v = next;
  }
  out = v;
  return true;
}

}  // namespace obliv1d
