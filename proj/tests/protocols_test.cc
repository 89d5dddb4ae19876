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

#include <gtest/gtest.h>

#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "mpc_test_util.h"

namespace obliv1d {
namespace {

using testing::Combo;
using testing::FloorShift;
using testing::In;
using testing::Out;
using testing::RunCompute;
using testing::SupportedCombos;
using testing::TestSeed;

// Delegates to a dealer but hands out one scripted triple.
class ScriptedTriples : public Preprocessing {
 public:
  ScriptedTriples(DealerSource& inner, TripleBatch t) : inner_(inner), t_(std::move(t)) {}
  const Ring& ring() const override { return inner_.ring(); }
  SchemeCode scheme() const override { return inner_.scheme(); }
  int node() const override { return inner_.node(); }
  TripleBatch Triples(size_t) override { return t_; }
  ShareVec Bits(size_t n) override { return inner_.Bits(n); }
  MaskBatch Masks(int owner, size_t n) override { return inner_.Masks(owner, n); }
  u128 MacKeyShare() const override { return inner_.MacKeyShare(); }
  PrssKeys Prss() const override { return inner_.Prss(); }

 private:
  DealerSource& inner_;
  TripleBatch t_;
};

TEST(MulTest, BeaverWorkedExampleZ7) {
  const Ring r = Ring::Prime64(7, 0, 2, 0);
  const SchemeCode code = SchemeCode::kSemi2pc;
  SimulatedHub hub({0, 1});
  // x = 3 = 1 + 2, y = 5 = 4 + 1, (a, b, c) = (1, 2, 2).
  const u128 xs[2] = {1, 2}, ys[2] = {4, 1};
  const u128 as[2] = {0, 1}, bs[2] = {1, 1}, cs[2] = {2, 0};
  std::mutex mu;
  std::map<int, Vec> sent;
  Vec result[2];
  std::vector<std::thread> th;
  for (int node = 0; node < 2; ++node) {
    th.emplace_back([&, node] {
      auto net = hub.Connect({1, 0, r, node, {0, 1}});
      DealerSource dealer(r, code, node, TestSeed(1));
      auto sv = [](u128 v) { return ShareVec{Scheme::kAdditive, {v}, {}}; };
      ScriptedTriples pre(dealer, {sv(as[node]), sv(bs[node]), sv(cs[node])});
      Party p(*net, pre, code, TestSeed(2));
      p.SetTamper([&](MsgKind k, int, Vec& v) {
        std::lock_guard<std::mutex> lock(mu);
        if (k == MsgKind::kBeaver) sent[node] = v;
      });
      ShareVec z = Mul(p, sv(xs[node]), sv(ys[node]));
      result[node] = Open(p, z);
    });
  }
  for (auto& t : th) t.join();
  // d = x - a = 2 and e = y - b = 3 are the opened values.
  EXPECT_EQ(r.Add(sent[0][0], sent[1][0]), 2u);
  EXPECT_EQ(r.Add(sent[0][1], sent[1][1]), 3u);
  EXPECT_EQ(result[0], Vec{1});
  EXPECT_EQ(result[1], Vec{1});
}

TEST(MulTest, ReplicatedWorkedExampleZ5) {
  const Ring r = Ring::Prime64(5, 0, 2, 0);
  const SchemeCode code = SchemeCode::kSemi3pc;
  SimulatedHub hub({0, 1, 2});
  const u128 x[3] = {1, 3, 3}, y[3] = {2, 0, 1};
  const u128 expect_local[3] = {8 % 5, 3 % 5, 10 % 5};
  Vec result[3];
  u128 local[3];
  std::vector<std::thread> th;
  for (int node = 0; node < 3; ++node) {
    th.emplace_back([&, node] {
      auto net = hub.Connect({1, 2, r, node, {0, 1, 2}});
      DealerSource pre(r, code, node, TestSeed(3));
      PrssState twin(r, pre.Prss());
      const u128 u = twin.Zero(1)[0];
      Party p(*net, pre, code, TestSeed(4));
      p.SetTamper([&](MsgKind k, int, Vec& v) {
        if (k == MsgKind::kReshare) local[node] = r.Sub(v[0], u);
      });
      const int nx = (node + 1) % 3;
      ShareVec xs{Scheme::kReplicated, {x[node]}, {x[nx]}};
      ShareVec ys{Scheme::kReplicated, {y[node]}, {y[nx]}};
      result[node] = Open(p, Mul(p, xs, ys));
    });
  }
  for (auto& t : th) t.join();
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(local[i], expect_local[i]) << "server " << i;
    EXPECT_EQ(result[i], Vec{1});
  }
}

class ComboTest : public ::testing::TestWithParam<Combo> {};

std::string ComboName(const ::testing::TestParamInfo<Combo>& info) {
  std::string s = info.param.name();
  for (char& c : s) {
    if (!isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

TEST_P(ComboTest, MulMatchesPlainProduct) {
  std::mt19937_64 rng(11);
  std::vector<int64_t> x(200), y(200), want(200);
  for (int i = 0; i < 200; ++i) {
    x[i] = static_cast<int64_t>(rng() % 200001) - 100000;
    y[i] = i % 7 == 0 ? 0 : static_cast<int64_t>(rng() % 20001) - 10000;
    want[i] = x[i] * y[i];
  }
  auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    return Out(p, Mul(p, In(p, x), In(p, y)));
  });
  EXPECT_EQ(got, want);
}

TEST_P(ComboTest, MatMulMatchesPlainProduct) {
  std::mt19937_64 rng(12);
  const size_t m = 3, k = 4, n = 2;
  std::vector<int64_t> a(m * k), b(k * n), want(m * n, 0);
  for (auto& v : a) v = static_cast<int64_t>(rng() % 2001) - 1000;
  for (auto& v : b) v = static_cast<int64_t>(rng() % 2001) - 1000;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t t = 0; t < k; ++t) want[i * n + j] += a[i * k + t] * b[t * n + j];
  auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    return Out(p, MatMul(p, In(p, a), In(p, b), m, k, n));
  });
  EXPECT_EQ(got, want);

  std::vector<int64_t> id = {1, 0, 0, 1}, sq = {5, -6, 7, 8};
  auto same = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    return Out(p, MatMul(p, In(p, id), In(p, sq), 2, 2, 2));
  });
  EXPECT_EQ(same, sq);
}

TEST_P(ComboTest, TruncDetExhaustive) {
  std::vector<int64_t> xs;
  for (int64_t x = -1024; x <= 1024; ++x) xs.push_back(x);
  for (int f = 1; f <= 8; ++f) {
    auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
      return Out(p, TruncDet(p, In(p, xs), f, p.ring().value_bits()));
    });
    ASSERT_EQ(got.size(), xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      ASSERT_EQ(got[i], FloorShift(xs[i], f)) << "x=" << xs[i] << " f=" << f;
    }
  }
}

TEST_P(ComboTest, TruncDetWideInputs) {
  // Wider than the comparison domain: exercises the full-range paths.
  const int bits = GetParam().prime ? 60 : 70;
  std::mt19937_64 rng(13);
  std::vector<int64_t> xs = {13, -13, 0, -1};
  const int64_t lim = int64_t{1} << std::min(bits - 2, 62);
  for (int i = 0; i < 300; ++i) {
    xs.push_back(static_cast<int64_t>(rng() % static_cast<uint64_t>(lim)) *
                 (i % 2 ? 1 : -1));
  }
  for (int m : {2, 16, 31}) {
    auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
      return Out(p, TruncDet(p, In(p, xs), m, bits));
    });
    ASSERT_EQ(got.size(), xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      ASSERT_EQ(got[i], FloorShift(xs[i], m)) << "x=" << xs[i] << " m=" << m;
    }
  }
}

TEST_P(ComboTest, TruncProbWithinOneAndExactOnMultiples) {
  std::vector<int64_t> xs = {12, 13, -13, -12};
  std::mt19937_64 rng(14);
  for (int i = 0; i < 200; ++i) xs.push_back(static_cast<int64_t>(rng() % 2000001) - 1000000);
  for (bool wide : {false, true}) {
    const int bits = wide ? (GetParam().prime ? 62 : 70) : 32;
    auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
      return Out(p, TruncProb(p, In(p, xs), 2, bits));
    });
    ASSERT_EQ(got.size(), xs.size());
    EXPECT_EQ(got[0], 3);
    EXPECT_EQ(got[3], -3);
    for (size_t i = 0; i < xs.size(); ++i) {
      const int64_t lo = FloorShift(xs[i], 2);
      EXPECT_TRUE(got[i] == lo || got[i] == lo + 1) << "x=" << xs[i];
    }
  }
}

TEST(TruncProbTest, RoundingFrequencyMatchesRemainder) {
  const int kTrials = 100000;
  std::vector<int64_t> xs(kTrials, 13);
  auto got = RunCompute(Ring::Prime64(), SchemeCode::kSemi2pc, [&](Party& p) {
    return Out(p, TruncProb(p, In(p, xs), 2, 32));
  });
  ASSERT_EQ(got.size(), xs.size());
  int ups = 0;
  for (int64_t v : got) {
    ASSERT_TRUE(v == 3 || v == 4);
    ups += v == 4;
  }
  const double sigma = std::sqrt(kTrials * 0.25 * 0.75);
  EXPECT_LT(std::abs(ups - kTrials * 0.25), 3 * sigma);
}

TEST_P(ComboTest, TruncSecretMatchesShift) {
  std::mt19937_64 rng(15);
  std::vector<int64_t> xs = {40, 40, -40, 123456};
  std::vector<int> shifts = {3, 0, 3, 16};
  for (int i = 0; i < 6; ++i) {
    xs.push_back(static_cast<int64_t>(rng() % 2000001) - 1000000);
    shifts.push_back(static_cast<int>(rng() % 17));
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
      ShareVec n = In(p, {shifts[i]});
      return Out(p, TruncSecret(p, In(p, {xs[i]}), n, 32));
    });
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0], FloorShift(xs[i], shifts[i])) << xs[i] << " >> " << shifts[i];
  }
}

TEST_P(ComboTest, LtzAndEqzExhaustive) {
  std::vector<int64_t> xs;
  for (int64_t x = -1024; x <= 1024; ++x) xs.push_back(x);
  const int64_t edge = (int64_t{1} << 31) - 1;
  xs.insert(xs.end(), {edge, -edge, edge - 1, -edge + 1});
  auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    ShareVec x = In(p, xs);
    ShareVec both[] = {Ltz(p, x), Eqz(p, x)};
    return Out(p, Concat(both));
  });
  ASSERT_EQ(got.size(), 2 * xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(got[i], xs[i] < 0 ? 1 : 0) << "ltz " << xs[i];
    EXPECT_EQ(got[xs.size() + i], xs[i] == 0 ? 1 : 0) << "eqz " << xs[i];
  }
}

TEST_P(ComboTest, BitLtMatchesIntegerCompare) {
  std::mt19937_64 rng(77);
  std::vector<int> widths;
  std::vector<uint64_t> as, bs;
  for (int w : {1, 2, 3, 5, 8, 13, 31, 32, 63}) {
    const uint64_t mask = w == 64 ? ~uint64_t{0} : (uint64_t{1} << w) - 1;
    for (int t = 0; t < 12; ++t) {
      const uint64_t a = rng() & mask;
      uint64_t b = rng() & mask;
      if (t == 0) b = a;
      if (t == 1) b = (a + 1) & mask;
      if (t == 2) b = (a - 1) & mask;
      if (t == 3) b = a ^ (uint64_t{1} << (w - 1));
      widths.push_back(w);
      as.push_back(a);
      bs.push_back(b);
    }
  }
  std::vector<int64_t> bits;
  for (size_t e = 0; e < bs.size(); ++e) {
    for (int i = 0; i < widths[e]; ++i) bits.push_back((bs[e] >> i) & 1);
  }
  auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    Vec a(as.begin(), as.end());
    return Out(p, BitLT(p, a, In(p, bits), widths));
  });
  ASSERT_EQ(got.size(), as.size());
  for (size_t e = 0; e < as.size(); ++e) {
    EXPECT_EQ(got[e], as[e] < bs[e] ? 1 : 0) << as[e] << " < " << bs[e] << " w" << widths[e];
  }
}

TEST_P(ComboTest, SelectAndRelu) {
  std::vector<int64_t> row = {1, 19, -35, -30, 1, 4};
  auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    ShareVec relu = ReluThreshold(p, In(p, row), In(p, {0}));
    ShareVec pick = Select(p, In(p, {1, 0}), In(p, {7, 7}), In(p, {-2, -2}));
    ShareVec thr = ReluThreshold(p, In(p, {3, 10, 11, 200}), In(p, {10}));
    ShareVec parts[] = {relu, pick, thr};
    return Out(p, Concat(parts));
  });
  std::vector<int64_t> want = {1, 19, 0, 0, 1, 4, 7, -2, 10, 10, 11, 200};
  EXPECT_EQ(got, want);
}

TEST_P(ComboTest, ArgmaxMatchesFirstMaximum) {
  std::mt19937_64 rng(16);
  const size_t groups = 40, len = 8;
  std::vector<int64_t> xs(groups * len);
  for (auto& v : xs) v = static_cast<int64_t>(rng() % 9) - 4;  // many ties
  auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    ArgmaxResult a = Argmax(p, In(p, xs), groups);
    ArgmaxResult b = Argmax(p, In(p, {3, 9, 2}));
    ArgmaxResult c = Argmax(p, In(p, {5, 5, 1}));
    ShareVec parts[] = {a.index, a.value, b.index, c.index};
    return Out(p, Concat(parts));
  });
  ASSERT_EQ(got.size(), 2 * groups + 2);
  for (size_t g = 0; g < groups; ++g) {
    auto begin = xs.begin() + g * len;
    auto it = std::max_element(begin, begin + len);
    EXPECT_EQ(got[g], it - begin) << "group " << g;
    EXPECT_EQ(got[groups + g], *it);
  }
  EXPECT_EQ(got[2 * groups], 1);
  EXPECT_EQ(got[2 * groups + 1], 0);
}

TEST_P(ComboTest, DivSecretWithinTolerance) {
  const int f = 16;
  const double ulp = std::ldexp(1.0, -f);
  std::mt19937_64 rng(17);
  std::vector<double> nums = {10, 12.75, 5, -7.5, 0, 1000.125};
  std::vector<int64_t> dens = {4, 1, 2, 3, 5, 64};
  for (int i = 0; i < 60; ++i) {
    nums.push_back((static_cast<double>(rng() % 4000001) - 2000000) / 1000.0);
    dens.push_back(static_cast<int64_t>(rng() % 64) + 1);
  }
  std::vector<int64_t> enc(nums.size());
  for (size_t i = 0; i < nums.size(); ++i) enc[i] = std::llround(nums[i] / ulp);
  auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
    return Out(p, DivSecret(p, In(p, enc), In(p, dens), f));
  });
  ASSERT_EQ(got.size(), nums.size());
  for (size_t i = 0; i < nums.size(); ++i) {
    const double q = static_cast<double>(enc[i]) * ulp / static_cast<double>(dens[i]);
    const double err = std::abs(static_cast<double>(got[i]) * ulp - q);
    EXPECT_LE(err, std::ldexp(1.0, -f + 2) * std::max(1.0, std::abs(q)))
        << nums[i] << " / " << dens[i] << " -> " << got[i] * ulp;
  }
  EXPECT_NEAR(got[0] * ulp, 2.5, std::ldexp(1.0, -14));
}

TEST_P(ComboTest, MulPublicFracMatchesQuotient) {
  const int f = 16;
  std::mt19937_64 rng(18);
  std::vector<int64_t> xs = {20 << f, 7 << f, -(3 << f)};
  for (int i = 0; i < 50; ++i) xs.push_back(static_cast<int64_t>(rng() % 20000001) - 10000000);
  for (uint64_t P : {1, 2, 3, 4, 8}) {
    auto got = RunCompute(GetParam().ring(), GetParam().code, [&](Party& p) {
      return Out(p, MulPublicFrac(p, In(p, xs), P, 32));
    });
    ASSERT_EQ(got.size(), xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      const double q = static_cast<double>(xs[i]) / static_cast<double>(P);
      EXPECT_LE(std::abs(got[i] - q), 2.0) << xs[i] << " / " << P;
    }
    if (P == 4) EXPECT_EQ(got[0], 5 << f);
    if (P == 1) EXPECT_EQ(got, xs);
  }
}

TEST(DivSecretTest, ErrorBudgetOverManyCases) {
  const int f = 16;
  const double ulp = std::ldexp(1.0, -f);
  std::mt19937_64 rng(19);
  std::vector<int64_t> enc, dens;
  for (int i = 0; i < 1000; ++i) {
    // Numerators spread over magnitudes from below one ulp to 2^14.
    const int mag = static_cast<int>(rng() % 31);
    const int64_t v = static_cast<int64_t>(rng() % (uint64_t{1} << mag));
    enc.push_back(i % 2 ? v : -v);
    dens.push_back(static_cast<int64_t>(rng() % 64) + 1);
  }
  for (SchemeCode code : {SchemeCode::kSemi2pc, SchemeCode::kSemi3pc}) {
    auto got = RunCompute(Ring::Prime64(), code, [&](Party& p) {
      return Out(p, DivSecret(p, In(p, enc), In(p, dens), f));
    });
    ASSERT_EQ(got.size(), enc.size());
    double worst = 0;
    for (size_t i = 0; i < enc.size(); ++i) {
      const double q = static_cast<double>(enc[i]) * ulp / static_cast<double>(dens[i]);
      const double err = std::abs(static_cast<double>(got[i]) * ulp - q);
      worst = std::max(worst, err / std::max(1.0, std::abs(q)) / ulp);
    }
    RecordProperty("worst_error_ulps", std::to_string(worst));
    EXPECT_LE(worst, 4.0);
  }
}

INSTANTIATE_TEST_SUITE_P(AllSchemes, ComboTest, ::testing::ValuesIn(SupportedCombos()),
                         ComboName);

}  // namespace
}  // namespace obliv1d
