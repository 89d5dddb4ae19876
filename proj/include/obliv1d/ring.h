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
#include <string>
#include <vector>

#include "obliv1d/errors.h"

namespace obliv1d {

using u128 = unsigned __int128;
using i128 = __int128;

// Bulk storage for ring elements. Every value is kept reduced.
using Vec = std::vector<u128>;

enum class RingKind : uint8_t { kPrime64 = 0, kMod2k = 1 };

// 2^64 - 59, the largest prime below 2^64.
inline constexpr uint64_t kDefaultPrime = 0xffffffffffffffc5ULL;

bool IsPrime64(uint64_t n);

// Describes Z_p (p prime, 64-bit by default; small primes are accepted for
// worked examples) or Z_{2^k} together with the fixed-point
// and comparison parameters the protocols run with.
class Ring {
 public:
  static Ring Prime64(uint64_t p = kDefaultPrime, int frac_bits = 16,
                      int value_bits = 32, int stat_sec = 30);
  static Ring Mod2k(int k = 72, int frac_bits = 16, int value_bits = 32,
                    int stat_sec = 40);

  RingKind kind() const { return kind_; }
  bool is_prime() const { return kind_ == RingKind::kPrime64; }
  // p for Prime64, 2^k for Mod2k.
  u128 modulus() const { return modulus_; }
  uint64_t prime() const { return static_cast<uint64_t>(modulus_); }
  // Exponent k for Mod2k; bit length of p for Prime64.
  int k() const { return k_; }
  int bit_length() const { return k_; }
  int frac_bits() const { return frac_bits_; }
  int value_bits() const { return value_bits_; }
  int stat_sec() const { return stat_sec_; }
  size_t element_bytes() const { return is_prime() ? 8 : 16; }

  u128 Reduce(u128 v) const {
    return is_prime() ? v % modulus_ : (v & mask_);
  }
  u128 Add(u128 a, u128 b) const {
    if (is_prime()) {
      u128 s = a + b;
      return s >= modulus_ ? s - modulus_ : s;
    }
    return (a + b) & mask_;
  }
  u128 Sub(u128 a, u128 b) const {
    if (is_prime()) return a >= b ? a - b : a + modulus_ - b;
    return (a - b) & mask_;
  }
  u128 Neg(u128 a) const { return Sub(0, a); }
  u128 Mul(u128 a, u128 b) const {
    // For Prime64 both operands are < 2^64, so the product fits.
    return is_prime() ? (a * b) % modulus_ : (a * b) & mask_;
  }
  u128 Pow2(int e) const { return Reduce(u128{1} << e); }

  // Two's-complement style embedding of a signed integer.
  u128 FromSigned(i128 v) const;
  // Returns a if a < q/2, a - q otherwise.
  i128 ToSigned(u128 a) const;

  // round(v * 2^f) mod q. Throws RangeError when |round(v * 2^f)| does not
  // fit in value_bits - 1 bits.
  u128 EncodeFixed(double v, int f) const;
  u128 EncodeFixed(double v) const { return EncodeFixed(v, frac_bits_); }
  double DecodeFixed(u128 a, int f) const;
  double DecodeFixed(u128 a) const { return DecodeFixed(a, frac_bits_); }

  // Little-endian, element_bytes() per element.
  void Serialize(std::span<const u128> elems, std::vector<uint8_t>& out) const;
  Vec Deserialize(std::span<const uint8_t> bytes) const;

  // Compact descriptor used by the handshake and preprocessing headers.
  std::vector<uint8_t> DescriptorBytes() const;
  static Ring FromDescriptorBytes(std::span<const uint8_t> bytes);

  std::string Name() const;

  bool operator==(const Ring& o) const {
    return kind_ == o.kind_ && modulus_ == o.modulus_ &&
           frac_bits_ == o.frac_bits_ && value_bits_ == o.value_bits_ &&
           stat_sec_ == o.stat_sec_;
  }

 private:
  Ring() = default;
  void Validate() const;

  RingKind kind_ = RingKind::kPrime64;
  u128 modulus_ = 0;
  u128 mask_ = 0;
  int k_ = 0;
  int frac_bits_ = 16;
  int value_bits_ = 32;
  int stat_sec_ = 30;
};

// A single element tagged with its ring; the bulk code paths use Vec.
struct RingElement {
  Ring ring;
  u128 value = 0;
};

enum class ArithOp { kAdd, kSub, kMul };

// Throws DescriptorMismatch when the operands live in different rings.
RingElement RingArith(const RingElement& a, const RingElement& b, ArithOp op);
i128 SignedLift(const RingElement& a);

std::string ToString(u128 v);
std::string ToString(i128 v);
bool ParseU128(std::string_view s, u128& out);

}  // namespace obliv1d
