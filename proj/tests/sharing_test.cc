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

#include "gtest/gtest.h"

namespace obliv1d {
namespace {

const Ring kZ7 = Ring::Prime64(7, 0, 2, 0);
const Ring kZ5 = Ring::Prime64(5, 0, 2, 0);

std::vector<ShareContext> Contexts(Scheme s, int n, const Vec& alpha = {}) {
  std::vector<ShareContext> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({s, i, n, alpha.empty() ? 0 : alpha[i]});
  }
  return out;
}

TEST(SharingTest, AdditiveExample) {
  std::vector<ShareVec> s = {{Scheme::kAdditive, {3}, {}}, {Scheme::kAdditive, {2}, {}}};
  EXPECT_EQ(Reconstruct(kZ7, s), Vec{5});
}

TEST(SharingTest, ReplicatedLayout) {
  // Summands (1, 3, 3) of x = 2 over Z_5.
  std::vector<ShareVec> s = {{Scheme::kReplicated, {1}, {3}},
                             {Scheme::kReplicated, {3}, {3}},
                             {Scheme::kReplicated, {3}, {1}}};
  EXPECT_EQ(Reconstruct(kZ5, s), Vec{2});
  Prg prg(KeyFromSeed(1));
  auto made = Share(kZ5, Scheme::kReplicated, Vec{2}, 3, prg);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(made[i].b, made[(i + 1) % 3].a);
}

TEST(SharingTest, MacExample) {
  Prg prg(KeyFromSeed(2));
  Vec alpha = {1, 2};  // alpha = 3
  auto s = Share(kZ7, Scheme::kAuthenticated, Vec{4}, 2, prg, alpha);
  EXPECT_EQ(kZ7.Add(s[0].b[0], s[1].b[0]), 5u);
  EXPECT_TRUE(MacRelationHolds(kZ7, s, alpha));
}

TEST(SharingTest, LinearOperationExamples) {
  Prg prg(KeyFromSeed(3));
  Vec alpha = {5, 5};
  auto ctx = Contexts(Scheme::kAuthenticated, 2, alpha);
  auto x = Share(kZ7, Scheme::kAuthenticated, Vec{5}, 2, prg, alpha);
  std::vector<ShareVec> plus4 = {AddPublic(kZ7, ctx[0], x[0], 4),
                                 AddPublic(kZ7, ctx[1], x[1], 4)};
  EXPECT_EQ(Reconstruct(kZ7, plus4), Vec{2});
  EXPECT_TRUE(MacRelationHolds(kZ7, plus4, alpha));

  auto two = Share(kZ7, Scheme::kAuthenticated, Vec{2}, 2, prg, alpha);
  std::vector<ShareVec> times3 = {Scale(kZ7, two[0], 3), Scale(kZ7, two[1], 3)};
  EXPECT_EQ(Reconstruct(kZ7, times3), Vec{6});
  EXPECT_TRUE(MacRelationHolds(kZ7, times3, alpha));

  auto a = Share(kZ7, Scheme::kAdditive, Vec{3}, 2, prg);
  auto b = Share(kZ7, Scheme::kAdditive, Vec{6}, 2, prg);
  std::vector<ShareVec> sum = {Add(kZ7, a[0], b[0]), Add(kZ7, a[1], b[1])};
  EXPECT_EQ(Reconstruct(kZ7, sum), Vec{2});
}

TEST(SharingTest, InputShareExample) {
  Prg prg(KeyFromSeed(4));
  auto ctx = Contexts(Scheme::kAdditive, 2);
  auto r = Share(kZ7, Scheme::kAdditive, Vec{2}, 2, prg);
  Vec c = {kZ7.Sub(6, 2)};
  EXPECT_EQ(c[0], 4u);
  std::vector<ShareVec> a = {InputShare(kZ7, ctx[0], r[0], c),
                             InputShare(kZ7, ctx[1], r[1], c)};
  EXPECT_EQ(Reconstruct(kZ7, a), Vec{6});
}

TEST(SharingTest, MixedSchemesRejected) {
  ShareVec a{Scheme::kAdditive, {1}, {}};
  ShareVec r{Scheme::kReplicated, {1}, {1}};
  EXPECT_THROW(Add(kZ7, a, r), UsageError);
  std::vector<ShareVec> both = {a, r};
  EXPECT_THROW(Reconstruct(kZ7, both), UsageError);
}

struct Combo {
  Scheme scheme;
  bool prime;
};

class SharingPropertyTest : public ::testing::TestWithParam<Combo> {
 protected:
  Ring ring() const { return GetParam().prime ? Ring::Prime64() : Ring::Mod2k(); }
  int parties() const { return GetParam().scheme == Scheme::kReplicated ? 3 : 2; }
};

TEST_P(SharingPropertyTest, ShareReconstructIdentity) {
  Ring r = ring();
  Prg prg(KeyFromSeed(10));
  Vec alpha = prg.Uniform(r, parties());
  Vec x = prg.Uniform(r, 10000);
  auto s = Share(r, GetParam().scheme, x, parties(), prg, alpha);
  EXPECT_EQ(Reconstruct(r, s), x);
  if (GetParam().scheme == Scheme::kReplicated) {
    for (int i = 0; i < 3; ++i) EXPECT_EQ(s[i].b, s[(i + 1) % 3].a);
  }
}

TEST_P(SharingPropertyTest, RandomLinearPrograms) {
  Ring r = ring();
  const int n = parties();
  const Scheme sch = GetParam().scheme;
  Prg prg(KeyFromSeed(20));
  Vec alpha = prg.Uniform(r, n);
  auto ctx = Contexts(sch, n, alpha);
  // Plaintext shadow alongside shared registers.
  std::vector<Vec> plain;
  std::vector<std::vector<ShareVec>> reg;
  for (int i = 0; i < 4; ++i) {
    plain.push_back(prg.Uniform(r, 8));
    reg.push_back(Share(r, sch, plain.back(), n, prg, alpha));
  }
  for (int step = 0; step < 300; ++step) {
    size_t i = prg.NextU64() % reg.size(), j = prg.NextU64() % reg.size();
    u128 c = prg.Uniform(r), d = prg.Uniform(r), off = prg.Uniform(r);
    Vec want(8);
    for (int e = 0; e < 8; ++e) {
      want[e] = r.Add(r.Add(r.Mul(c, plain[i][e]), r.Mul(d, plain[j][e])), off);
    }
    std::vector<ShareVec> got(n);
    for (int p = 0; p < n; ++p) {
      LinTerm terms[] = {{c, &reg[i][p]}, {d, &reg[j][p]}};
      got[p] = LinComb(r, ctx[p], terms, off);
    }
    ASSERT_EQ(Reconstruct(r, got), want);
    if (sch == Scheme::kAuthenticated) ASSERT_TRUE(MacRelationHolds(r, got, alpha));
    plain[i] = want;
    reg[i] = got;
  }
}

TEST_P(SharingPropertyTest, SerializationRoundTrip) {
  Ring r = ring();
  Prg prg(KeyFromSeed(30));
  Vec alpha = prg.Uniform(r, parties());
  auto s = Share(r, GetParam().scheme, prg.Uniform(r, 17), parties(), prg, alpha);
  auto bytes = SerializeShares(r, s[0]);
  size_t per = s[0].has_b() ? 2 : 1;
  EXPECT_EQ(bytes.size(), 1 + 17 * per * r.element_bytes());
  ShareVec back = DeserializeShares(r, bytes);
  EXPECT_EQ(back.a, s[0].a);
  EXPECT_EQ(back.b, s[0].b);
}

INSTANTIATE_TEST_SUITE_P(
    AllSchemes, SharingPropertyTest,
    ::testing::Values(Combo{Scheme::kAdditive, true}, Combo{Scheme::kAdditive, false},
                      Combo{Scheme::kAuthenticated, true},
                      Combo{Scheme::kReplicated, true},
                      Combo{Scheme::kReplicated, false}),
    [](const auto& info) {
      return std::string(SchemeName(info.param.scheme)) +
             (info.param.prime ? "Prime64" : "Mod2k");
    });

// Pearson statistic over Z_31 with 30 degrees of freedom; the 0.99 quantile
// of chi^2(30) is 50.892.
double ChiSquare(const std::vector<int>& counts, int total) {
  double expect = double(total) / counts.size(), stat = 0;
  for (int c : counts) stat += (c - expect) * (c - expect) / expect;
  return stat;
}

TEST(SharingUniformityTest, SingleSharesLookUniform) {
  const Ring z31 = Ring::Prime64(31, 0, 2, 0);
  const int kSamples = 100000;
  Prg prg(KeyFromSeed(40));
  for (Scheme sch : {Scheme::kAdditive, Scheme::kReplicated}) {
    const int n = sch == Scheme::kReplicated ? 3 : 2;
    std::vector<int> first(31), pair(31 * 31);
    for (int t = 0; t < kSamples; ++t) {
      // A fixed secret: the share distribution must not depend on it.
      auto s = Share(z31, sch, Vec{17}, n, prg);
      ++first[static_cast<int>(s[1].a[0])];
      if (sch == Scheme::kReplicated) {
        ++pair[static_cast<int>(s[1].a[0] * 31 + s[1].b[0])];
      }
    }
    EXPECT_LT(ChiSquare(first, kSamples), 50.892) << SchemeName(sch);
    if (sch == Scheme::kReplicated) {
      // chi^2(960) 0.99 quantile is about 1064.
      EXPECT_LT(ChiSquare(pair, kSamples), 1064.0);
    }
  }
}

}  // namespace
}  // namespace obliv1d
