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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "obliv1d/crypto.h"
#include "obliv1d/ring.h"

namespace obliv1d {
namespace {

const Ring kZ7 = Ring::Prime64(7, 0, 2, 0);

RingElement E(const Ring& r, u128 v) { return {r, v}; }

TEST(RingTest, SmallPrimeArithmetic) {
  EXPECT_EQ(RingArith(E(kZ7, 5), E(kZ7, 4), ArithOp::kAdd).value, 2u);
  EXPECT_EQ(RingArith(E(kZ7, 3), E(kZ7, 5), ArithOp::kMul).value, 1u);
  EXPECT_EQ(RingArith(E(kZ7, 3), E(kZ7, 5), ArithOp::kSub).value, 5u);
}

TEST(RingTest, Mod2kWraparound) {
  Ring r = Ring::Mod2k();
  u128 top = (u128{1} << 72) - 1;
  EXPECT_EQ(RingArith(E(r, top), E(r, 1), ArithOp::kAdd).value, 0u);
}

TEST(RingTest, DescriptorMismatchThrows) {
  EXPECT_THROW(RingArith(E(kZ7, 1), E(Ring::Mod2k(), 1), ArithOp::kAdd),
               DescriptorMismatch);
}

TEST(RingTest, SignedLift) {
  EXPECT_EQ(SignedLift(E(kZ7, 6)), -1);
  EXPECT_EQ(SignedLift(E(kZ7, 3)), 3);
  Ring r = Ring::Mod2k();
  EXPECT_EQ(SignedLift(E(r, (u128{1} << 72) - 35)), -35);
}

TEST(RingTest, FixedPointEncoding) {
  Ring p = Ring::Prime64();
  EXPECT_EQ(p.EncodeFixed(2.5, 2), 10u);
  EXPECT_EQ(p.EncodeFixed(-1.25, 2), p.modulus() - 5);
  EXPECT_EQ(p.EncodeFixed(0.1, 16), 6554u);
  // 6554 / 65536 computed exactly.
  EXPECT_DOUBLE_EQ(p.DecodeFixed(6554, 16), 6554.0 / 65536.0);
  EXPECT_THROW(p.EncodeFixed(double(1ll << 20), 16), RangeError);
}

TEST(RingTest, DefaultPrimeIsLargest64BitPrime) {
  EXPECT_TRUE(IsPrime64(kDefaultPrime));
  for (uint64_t c = kDefaultPrime + 2; c > kDefaultPrime; c += 2) {
    EXPECT_FALSE(IsPrime64(c)) << c;
  }
  EXPECT_THROW(Ring::Prime64(kDefaultPrime - 2), UsageError);
}

TEST(RingTest, ValidationRejectsBadParameters) {
  EXPECT_THROW(Ring::Prime64(kDefaultPrime, 16, 40, 30), UsageError);
  EXPECT_THROW(Ring::Mod2k(128), UsageError);
  EXPECT_THROW(Ring::Mod2k(72, 32, 32, 40), UsageError);
}

class RingPropertyTest : public ::testing::TestWithParam<int> {
 protected:
  Ring ring() const { return GetParam() == 0 ? Ring::Prime64() : Ring::Mod2k(); }
};

TEST_P(RingPropertyTest, AlgebraicLaws) {
  Ring r = ring();
  Prg prg(KeyFromSeed(11 + GetParam()));
  for (int i = 0; i < 10000; ++i) {
    u128 a = prg.Uniform(r), b = prg.Uniform(r), c = prg.Uniform(r);
    ASSERT_EQ(r.Add(a, b), r.Add(b, a));
    ASSERT_EQ(r.Mul(a, b), r.Mul(b, a));
    ASSERT_EQ(r.Add(r.Add(a, b), c), r.Add(a, r.Add(b, c)));
    ASSERT_EQ(r.Mul(r.Mul(a, b), c), r.Mul(a, r.Mul(b, c)));
    ASSERT_EQ(r.Mul(a, r.Add(b, c)), r.Add(r.Mul(a, b), r.Mul(a, c)));
    ASSERT_EQ(r.Sub(r.Add(a, b), b), a);
    ASSERT_LT(r.Add(a, b), r.modulus());
  }
}

TEST_P(RingPropertyTest, SignedRoundTrip) {
  Ring r = ring();
  std::mt19937_64 gen(5);
  for (int i = 0; i < 10000; ++i) {
    i128 v = static_cast<int64_t>(gen()) >> 2;
    ASSERT_EQ(r.ToSigned(r.FromSigned(v)), v);
  }
}

TEST_P(RingPropertyTest, FixedPointRoundTrip) {
  Ring r = ring();
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> dist(-30000.0, 30000.0);
  for (int i = 0; i < 10000; ++i) {
    double v = dist(gen);
    double back = r.DecodeFixed(r.EncodeFixed(v));
    ASSERT_LT(std::fabs(back - v), std::ldexp(1.0, -r.frac_bits()));
  }
}

TEST_P(RingPropertyTest, SerializationRoundTrip) {
  Ring r = ring();
  Prg prg(KeyFromSeed(3));
  Vec v = prg.Uniform(r, 257);
  std::vector<uint8_t> bytes;
  r.Serialize(v, bytes);
  EXPECT_EQ(bytes.size(), v.size() * r.element_bytes());
  EXPECT_EQ(r.Deserialize(bytes), v);
  bytes.pop_back();
  EXPECT_THROW(r.Deserialize(bytes), ProtocolError);
  EXPECT_EQ(Ring::FromDescriptorBytes(r.DescriptorBytes()), r);
}

INSTANTIATE_TEST_SUITE_P(BothRings, RingPropertyTest, ::testing::Values(0, 1),
                         [](const auto& info) {
                           return info.param == 0 ? "Prime64" : "Mod2k";
                         });

TEST(PrgTest, DeterministicAndKeySeparated) {
  Prg a(KeyFromSeed(1)), b(KeyFromSeed(1)), c(KeyFromSeed(2));
  for (int i = 0; i < 300; ++i) {
    uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    EXPECT_NE(x, c.NextU64());
  }
}

TEST(PrgTest, UniformBitsRespectsWidth) {
  Prg prg(KeyFromSeed(4));
  for (int bits : {1, 7, 63, 64, 65, 100}) {
    for (int i = 0; i < 100; ++i) EXPECT_LT(prg.UniformBits(bits), u128{1} << bits);
  }
}

TEST(CryptoTest, Sha256KnownAnswer) {
  const std::string s = "abc";
  Digest d = Sha256({reinterpret_cast<const uint8_t*>(s.data()), s.size()});
  EXPECT_EQ(HexEncode(d),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace obliv1d
