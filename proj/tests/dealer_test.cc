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

#include <filesystem>

#include "gtest/gtest.h"

namespace obliv1d {
namespace {

std::vector<std::unique_ptr<Preprocessing>> Dealers(const Ring& ring, SchemeCode code,
                                                    uint64_t seed = 1,
                                                    DealerOptions opts = {}) {
  std::vector<std::unique_ptr<Preprocessing>> v;
  for (int node : Describe(code).all_nodes()) {
    v.push_back(std::make_unique<DealerSource>(ring, code, node, KeyFromSeed(seed), opts));
  }
  return v;
}

Vec Open(const Ring& ring, SchemeCode code,
         const std::vector<ShareVec>& per_node) {
  const int n = Describe(code).num_parties;
  std::vector<ShareVec> s(per_node.begin(), per_node.begin() + n);
  return Reconstruct(ring, s);
}

struct Case {
  SchemeCode code;
  bool prime;
};

class DealerTest : public ::testing::TestWithParam<Case> {
 protected:
  Ring ring() const { return GetParam().prime ? Ring::Prime64() : Ring::Mod2k(); }
  SchemeCode code() const { return GetParam().code; }
};

TEST_P(DealerTest, TriplesMultiply) {
  Ring r = ring();
  auto d = Dealers(r, code());
  std::vector<ShareVec> a, b, c;
  for (auto& p : d) {
    auto t = p->Triples(200);
    a.push_back(t.a);
    b.push_back(t.b);
    c.push_back(t.c);
  }
  Vec av = Open(r, code(), a), bv = Open(r, code(), b), cv = Open(r, code(), c);
  for (size_t i = 0; i < av.size(); ++i) ASSERT_EQ(cv[i], r.Mul(av[i], bv[i]));
  if (code() == SchemeCode::kActive2pc) {
    Vec alpha = {d[0]->MacKeyShare(), d[1]->MacKeyShare()};
    std::vector<ShareVec> cc(c.begin(), c.begin() + 2);
    EXPECT_TRUE(MacRelationHolds(r, cc, alpha));
  }
}

TEST_P(DealerTest, MatrixTriple) {
  Ring r = ring();
  auto d = Dealers(r, code());
  std::vector<ShareVec> a, b, c;
  for (auto& p : d) {
    auto t = p->MatrixTriples(2, 3, 2);
    a.push_back(t.a);
    b.push_back(t.b);
    c.push_back(t.c);
  }
  Vec A = Open(r, code(), a), B = Open(r, code(), b), C = Open(r, code(), c);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      u128 want = 0;
      for (int t = 0; t < 3; ++t) want = r.Add(want, r.Mul(A[i * 3 + t], B[t * 2 + j]));
      EXPECT_EQ(C[i * 2 + j], want);
    }
  }
}

TEST_P(DealerTest, BitsBoundedAndFieldBits) {
  Ring r = ring();
  auto d = Dealers(r, code());
  std::vector<ShareVec> bits, bounded, fb;
  for (auto& p : d) {
    bits.push_back(p->Bits(100));
    bounded.push_back(p->Bounded(20, 100));
    fb.push_back(p->FieldBits(3));
  }
  for (u128 v : Open(r, code(), bits)) ASSERT_LE(v, 1u);
  for (u128 v : Open(r, code(), bounded)) ASSERT_LT(v, u128{1} << 20);
  Vec f = Open(r, code(), fb);
  ASSERT_EQ(f.size(), 3u * r.bit_length());
  for (int e = 0; e < 3; ++e) {
    u128 v = 0;
    for (int i = r.bit_length() - 1; i >= 0; --i) {
      ASSERT_LE(f[e * r.bit_length() + i], 1u);
      v = v * 2 + f[e * r.bit_length() + i];
    }
    EXPECT_LT(v, r.modulus() == 0 ? ~u128{0} : r.modulus());
  }
}

TEST_P(DealerTest, MasksGoOnlyToOwner) {
  Ring r = ring();
  auto d = Dealers(r, code());
  const SchemeInfo info = Describe(code());
  const int owner = info.alice();
  std::vector<ShareVec> shares;
  Vec plain;
  for (auto& p : d) {
    MaskBatch m = p->Masks(owner, 5);
    shares.push_back(m.shares);
    if (p->node() == owner) {
      plain = m.plain;
    } else {
      EXPECT_TRUE(m.plain.empty());
    }
  }
  EXPECT_EQ(Open(r, code(), shares), plain);
}

TEST_P(DealerTest, FileRoundTripMatchesDealer) {
  Ring r = ring();
  const SchemeInfo info = Describe(code());
  auto dir = std::filesystem::temp_directory_path() /
             ("obliv1d_pre_" + std::to_string(static_cast<int>(code())) +
              (GetParam().prime ? "p" : "m"));
  PreprocCounts counts{10, 64, {{info.alice(), 4}, {info.third_party(), 1}}};
  auto paths = WritePreprocFiles(dir.string(), r, code(), KeyFromSeed(9), counts);
  ASSERT_EQ(static_cast<int>(paths.size()), info.num_nodes());
  auto live = Dealers(r, code(), 9);
  for (int node = 0; node < info.num_nodes(); ++node) {
    FileSource fs(paths[node]);
    EXPECT_EQ(fs.ring(), r);
    EXPECT_EQ(fs.node(), node);
    EXPECT_EQ(fs.MacKeyShare(), live[node]->MacKeyShare());
    EXPECT_EQ(fs.Prss().own, live[node]->Prss().own);
    if (!info.is_compute(node) && node != info.alice()) {
      EXPECT_THROW(fs.Masks(info.alice(), 1), BudgetError);
      continue;
    }
    MaskBatch fm = fs.Masks(info.alice(), 4), lm = live[node]->Masks(info.alice(), 4);
    EXPECT_EQ(fm.plain, lm.plain);
    EXPECT_EQ(fm.shares.a, lm.shares.a);
    if (!info.is_compute(node)) continue;
    auto ft = fs.Triples(10), lt = live[node]->Triples(10);
    EXPECT_EQ(ft.c.a, lt.c.a);
    EXPECT_EQ(ft.c.b, lt.c.b);
    EXPECT_EQ(fs.Bits(64).a, live[node]->Bits(64).a);
    EXPECT_THROW(fs.Bits(1), BudgetError);
    EXPECT_THROW(fs.Triples(1), BudgetError);
  }
  std::filesystem::remove_all(dir);
}

INSTANTIATE_TEST_SUITE_P(
    Schemes, DealerTest,
    ::testing::Values(Case{SchemeCode::kSemi2pc, true}, Case{SchemeCode::kSemi2pc, false},
                      Case{SchemeCode::kActive2pc, true}, Case{SchemeCode::kSemi3pc, true},
                      Case{SchemeCode::kSemi3pc, false}, Case{SchemeCode::kActive3pc, true}),
    [](const auto& info) {
      std::string n = SchemeCodeName(info.param.code);
      n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
      return n + (info.param.prime ? "Prime64" : "Mod2k");
    });

TEST(DealerSmallTest, Z7TripleExample) {
  // The plaintext relation c = a * b holds for a = 1, b = 2 over Z_7.
  const Ring z7 = Ring::Prime64(7, 0, 2, 0);
  Prg prg(KeyFromSeed(1));
  auto a = Share(z7, Scheme::kAdditive, Vec{1}, 2, prg);
  auto b = Share(z7, Scheme::kAdditive, Vec{2}, 2, prg);
  auto c = Share(z7, Scheme::kAdditive, Vec{z7.Mul(1, 2)}, 2, prg);
  EXPECT_EQ(Reconstruct(z7, c), Vec{2});
}

TEST(DealerSmallTest, BudgetIsEnforced) {
  DealerOptions opts;
  opts.budget[kKindTriples] = 10;
  DealerSource d(Ring::Prime64(), SchemeCode::kSemi2pc, 0, KeyFromSeed(1), opts);
  d.Triples(6);
  EXPECT_THROW(d.Triples(5), BudgetError);
  d.Triples(4);
  EXPECT_EQ(d.consumed().at(kKindTriples), 10u);
}

TEST(DealerSmallTest, AuditSamplesAboutOnePercent) {
  DealerOptions opts;
  opts.audit = true;
  DealerSource d(Ring::Prime64(), SchemeCode::kActive2pc, 0, KeyFromSeed(1), opts);
  for (int i = 0; i < 3000; ++i) d.Bits(1);
  EXPECT_GT(d.audited(), 10u);
  EXPECT_LT(d.audited(), 60u);
}

TEST(DealerSmallTest, ActiveMod2kRejected) {
  EXPECT_THROW(DealerSource(Ring::Mod2k(), SchemeCode::kActive2pc, 0, KeyFromSeed(1)),
               UsageError);
}

TEST(PrssTest, ZeroSharingAndRandomReplicated) {
  auto d = Dealers(Ring::Prime64(), SchemeCode::kSemi3pc);
  Ring r = Ring::Prime64();
  std::vector<PrssState> st;
  for (int i = 0; i < 3; ++i) st.emplace_back(r, d[i]->Prss());
  std::vector<Vec> u;
  for (auto& s : st) u.push_back(s.Zero(50));
  for (int e = 0; e < 50; ++e) {
    EXPECT_EQ(r.Add(r.Add(u[0][e], u[1][e]), u[2][e]), 0u);
    EXPECT_NE(u[0][e], 0u);
  }
  std::vector<ShareVec> x;
  for (auto& s : st) x.push_back(s.Random(20));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(x[i].b, x[(i + 1) % 3].a);
}

}  // namespace
}  // namespace obliv1d
