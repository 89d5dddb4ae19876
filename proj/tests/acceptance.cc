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


// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
// any fails. `--only <name>` runs a single criterion.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "obliv1d/cli.h"
#include "obliv1d/engine.h"
#include "obliv1d/errors.h"
#include "obliv1d/model_io.h"
#include "obliv1d/secure_qnn.h"

namespace obliv1d {
namespace {

struct Combo {
  SchemeCode code;
  bool prime;
  Ring ring() const { return prime ? Ring::Prime64() : Ring::Mod2k(); }
  std::string name() const {
    return std::string(SchemeCodeName(code)) + (prime ? "/prime64" : "/mod2k");
  }
};

const std::vector<Combo> kCombos = {
    {SchemeCode::kSemi2pc, true},   {SchemeCode::kSemi2pc, false},
    {SchemeCode::kSemi3pc, true},   {SchemeCode::kSemi3pc, false},
    {SchemeCode::kActive2pc, true}, {SchemeCode::kActive3pc, true}};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs fn on the compute nodes and returns node 0's result; all compute
// nodes must agree.
std::vector<int64_t> Compute(const Combo& c, const std::function<std::vector<int64_t>(Party&)>& fn,
                             uint64_t seed = 1, PartyOptions po = {}) {
  SimOptions opts;
  opts.seed = KeyFromSeed(seed);
  opts.nodes = Describe(c.code).compute_nodes();
  opts.party = po;
  std::mutex mu;
  std::map<int, std::vector<int64_t>> outs;
  auto results = RunLocal(c.ring(), c.code, opts, [&](Party& p) {
    auto v = fn(p);
    std::lock_guard<std::mutex> lock(mu);
    outs[p.node()] = std::move(v);
  });
  if (const NodeResult* f = FirstFailure(results)) RethrowNodeError(*f);
  for (auto& [node, v] : outs) {
    if (v != outs[0]) throw std::runtime_error("compute nodes disagree");
  }
  return outs[0];
}

ShareVec In(Party& p, const std::vector<int64_t>& v, int owner = 0) {
  Vec enc(v.size());
  for (size_t i = 0; i < v.size(); ++i) enc[i] = p.ring().FromSigned(v[i]);
  return InputFrom(p, owner, v.size(), p.node() == owner ? &enc : nullptr);
}

std::vector<int64_t> Out(Party& p, const ShareVec& x) {
  Vec v = Open(p, x);
  MacCheckFlush(p);
  std::vector<int64_t> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<int64_t>(p.ring().ToSigned(v[i]));
  return out;
}

int64_t FloorShift(int64_t x, int m) {
  return x >= 0 ? x >> m : -((-x + (int64_t{1} << m) - 1) >> m);
}

// --- Oracle equivalence ----------------------------------------------------------

Outcome OracleEquivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const char* shapes[] = {"conv:4x3,pool:2,dense:4", "conv:4x3:trailing,pool:2:secret,dense:3",
                          "conv:3x5,conv:4x3,pool:4,dense:5",
                          "conv:4x3,pool:2,conv:4x3,pool:2,dense:4",
                          "conv:2x3,pool:2,dense:6,dense:3"};
  const int kModels = 100, kInputs = 5, kLength = 20;
  std::vector<QuantizedModel> models;
  std::vector<std::vector<std::vector<int64_t>>> inputs;
  std::vector<std::vector<int>> want;
  for (int i = 0; i < kModels; ++i) {
    models.push_back(GenRandomModel(shapes[i % 5], 5000 + i, kLength));
    inputs.push_back(GenRandomInputs(models.back(), kInputs, 6000 + i));
    std::vector<int> w;
    for (const auto& in : inputs.back()) w.push_back(InferPlain(models.back(), in).label);
    want.push_back(w);
  }
  int total = 0, matched = 0;
  std::string worst;
  for (const Combo& c : kCombos) {
    int combo_matched = 0;
    for (int i = 0; i < kModels; ++i) {
      SimOptions opts;
      opts.seed = KeyFromSeed(7000 + i);
      auto out = RunLocalInference(c.ring(), c.code, opts, models[i], inputs[i],
                                   TruncMode::kDeterministic, ParseRevealPolicy("alice"));
      for (int j = 0; j < kInputs; ++j) combo_matched += out.labels.at(j) == want[i][j];
      total += kInputs;
    }
    matched += combo_matched;
    if (combo_matched != kModels * kInputs) {
      worst += " " + c.name() + "=" + std::to_string(combo_matched);
    }
  }
  const double secs = Seconds(t0);
  std::ostringstream os;
  os << matched << "/" << total << " classes match (6 combos x " << kModels << " models x "
     << kInputs << " inputs) in " << static_cast<int>(secs) << " s" << worst;
  return {matched == total && secs < 1800, os.str()};
}

// --- Worked example ----------------------------------------------------------------

const std::vector<int64_t> kExampleX = {2, 4, 3, 0, 1, 2, 3, 1, 6, 8, 1, 3,
                                    1, 0, 2, 5, 7, 4, 2, 7, 1, 2, 3, 1};
const std::vector<int64_t> kExampleW = {1, 2, 0, -1, 0, 1, 0, -3, -1, 3, -2, -4};

Outcome WorkedExample() {
  const int f = 16;
  const std::vector<double> want = {10, 0, 2.5};
  const std::vector<int64_t> want_conv = {1, 19, -35, -30, 1, 4};
  auto conv = ConvAccumulate(kExampleX, 4, 6, kExampleW, 1, 3, {2}, Padding::kTrailing);
  std::vector<double> plain;
  for (int j = 0; j < 3; ++j) {
    plain.push_back((std::max<int64_t>(conv[2 * j], 0) + std::max<int64_t>(conv[2 * j + 1], 0)) /
                    2.0);
  }
  bool ok = conv == want_conv && plain == want;
  std::ostringstream os;
  os << "plain " << (ok ? "exact" : "MISMATCH");
  int64_t worst = 0;
  for (const Combo& c : kCombos) {
    auto got = Compute(c, [&](Party& p) {
      const Ring& r = p.ring();
      auto acc = SecureConvAccumulate(p, In(p, kExampleX), 4, 6, 1, In(p, kExampleW), 1, 3, In(p, {2}),
                                      Padding::kTrailing);
      auto relu = ReluThreshold(p, acc, Constant(p, acc.size(), 0));
      std::vector<ShareVec> sums;
      for (int j = 0; j < 3; ++j) {
        sums.push_back(Add(r, Slice(relu, 2 * j, 1), Slice(relu, 2 * j + 1, 1)));
      }
      ShareVec fixed = Scale(r, Concat(sums), r.FromSigned(int64_t{1} << f));
      auto conv_out = Out(p, acc);
      auto pooled = Out(p, MulPublicFrac(p, fixed, 2, 32));
      conv_out.insert(conv_out.end(), pooled.begin(), pooled.end());
      return conv_out;
    });
    if (std::vector<int64_t>(got.begin(), got.begin() + 6) != want_conv) ok = false;
    for (int j = 0; j < 3; ++j) {
      const int64_t dev = std::llabs(got[6 + j] - std::llround(want[j] * (1 << f)));
      worst = std::max(worst, dev);
    }
  }
  ok = ok && worst <= 1;
  os << "; secure conv exact and pool within " << worst << " unit(s) of 2^-16 on 6 combos";
  return {ok, os.str()};
}

// --- Truncation gap ------------------------------------------------------------------

Outcome TruncationGap() {
  const size_t kChunk = 25;
  const QuantizedModel m = LoadModel(DefaultModelPath());
  const TestVectors tv =
      LoadTestVectors(std::string(OBLIV1D_SOURCE_DIR) + "/testdata/tiny.qtest", m);
  std::vector<std::vector<int64_t>> ins;
  std::vector<int> golden;
  for (const TestCase& c : tv.cases) {
    ins.push_back(c.input);
    golden.push_back(c.label);
    if (InferPlain(m, c.input).layers != c.layers) return {false, "golden vectors drifted"};
  }
  std::ostringstream os;
  bool ok = ins.size() == 200;
  for (const Combo& c : {kCombos[0], kCombos[3]}) {
    int match = 0;
    for (size_t at = 0; at < ins.size(); at += kChunk) {
      const std::vector<std::vector<int64_t>> part(ins.begin() + at, ins.begin() + at + kChunk);
      SimOptions opts;
      opts.seed = KeyFromSeed(11 + at);
      auto out = RunLocalInference(c.ring(), c.code, opts, m, part, TruncMode::kDeterministic,
                                   ParseRevealPolicy("alice"));
      for (size_t i = 0; i < part.size(); ++i) match += out.labels.at(i) == golden[at + i];
    }
    ok = ok && match == 200;
    os << "det " << c.name() << " " << match << "/200; ";
  }
  // Probabilistic: per-layer outputs against the plaintext layer applied
  // to the secure previous activations.
  const QuantizedModel arch = Architecture(m);
  for (const Combo& c : {kCombos[0], kCombos[3]}) {
    SecureTrace trace;
    std::vector<int64_t> labels;
    for (size_t at = 0; at < ins.size(); at += kChunk) {
      std::vector<int64_t> flat;
      for (size_t b = at; b < at + kChunk; ++b) flat.insert(flat.end(), ins[b].begin(), ins[b].end());
      SecureTrace part;
      std::mutex mu;
      auto lab = Compute(c, [&](Party& p) {
        SharedModel sm = ShareModel(p, arch, 0, p.node() == 0 ? &m : nullptr);
        SecureInferOptions o;
        o.trunc = TruncMode::kProbabilistic;
        o.debug_reveal = true;
        SecureTrace tr;
        auto out = SecureInfer(p, sm, In(p, flat), kChunk, o, &tr);
        if (p.node() == 0) {
          std::lock_guard<std::mutex> lock(mu);
          part = std::move(tr);
        }
        return Out(p, out);
      }, 12 + at);
      labels.insert(labels.end(), lab.begin(), lab.end());
      trace.inputs.insert(trace.inputs.end(), part.inputs.begin(), part.inputs.end());
    }
    int64_t worst = 0;
    int requants = 0, match = 0;
    for (size_t b = 0; b < ins.size(); ++b) {
      match += labels.at(b) == golden[b];
      for (size_t l = 0; l < m.layers.size(); ++l) {
        const bool rq = std::holds_alternative<ConvLayer>(m.layers[l]) ||
                        std::holds_alternative<DenseLayer>(m.layers[l]);
        const auto& prev = l == 0 ? ins[b] : trace.inputs[b][l - 1];
        const auto expect = ApplyPlainLayer(m, l, prev);
        for (size_t i = 0; i < expect.size(); ++i) {
          const int64_t d = std::llabs(trace.inputs[b][l].at(i) - expect[i]);
          if (rq) {
            worst = std::max(worst, d);
            ++requants;
          } else if (d != 0 && l + 1 != m.layers.size()) {
            worst = std::max<int64_t>(worst, 1000);  // exact layers must not drift
          }
        }
      }
    }
    ok = ok && worst <= 1;
    os << "prob " << c.name() << " " << match << "/200 classes, max per-requant deviation "
       << worst << " over " << requants << " outputs; ";
  }
  return {ok, os.str()};
}

// --- Cheat detection --------------------------------------------------------------

struct CheatStats {
  int trials = 0, detected = 0, wrong_output = 0;
  bool honest_ok = false;
};

// One trial: node 1 adds a nonzero error to one element of its k-th
// message of `kind` during a small computation with a revealed output.
void CheatTrial(SchemeCode code, MsgKind kind, int k, uint64_t seed, CheatStats* st) {
  const Ring ring = Ring::Prime64();
  SimOptions opts;
  opts.seed = KeyFromSeed(seed);
  opts.nodes = Describe(code).compute_nodes();
  opts.party.triple_batch = 8;
  std::atomic<bool> tampered{false};
  std::atomic<int> seen{0};
  opts.setup = [&](Party& p) {
    if (p.node() != 1) return;
    auto rng = std::make_shared<std::mt19937_64>(seed);
    p.SetTamper([&, rng](MsgKind got, int, Vec& v) {
      if (got != kind || v.empty() || seen++ != k) return;
      u128 delta = 0;
      while (delta == 0) delta = ring.Reduce((*rng)());
      v[(*rng)() % v.size()] = ring.Add(v[(*rng)() % v.size()], delta);
      tampered = true;
    });
  };
  const std::vector<int64_t> xs = {3, -4, 5, 6, 100, -100};
  const std::vector<int64_t> ys = {7, 8, -9, 10, 3, 3};
  std::vector<int64_t> want;
  for (size_t i = 0; i < xs.size(); ++i) {
    const int64_t prod = xs[i] * ys[i];
    want.push_back(FloorShift(prod, 2));
  }
  for (size_t i = 0; i < xs.size(); ++i) want.push_back(xs[i] + ys[i] < 0);
  std::vector<int64_t> released;
  std::mutex mu;
  auto results = RunLocal(ring, code, opts, [&](Party& p) {
    ShareVec x = In(p, xs);
    ShareVec y = In(p, ys, 1);
    ShareVec prod = TruncDet(p, Mul(p, x, y), 2, 32);
    ShareVec neg = Ltz(p, Add(p.ring(), x, y));
    Vec out = RevealTo(p, 0, Concat(std::vector<ShareVec>{prod, neg}), 2 * xs.size());
    if (!out.empty()) {
      std::lock_guard<std::mutex> lock(mu);
      for (u128 v : out) released.push_back(static_cast<int64_t>(p.ring().ToSigned(v)));
    }
  });
  if (!tampered) {
    st->honest_ok = !FirstFailure(results) && released == want;
    return;
  }
  ++st->trials;
  const NodeResult* f = FirstFailure(results);
  if (f && f->error == ErrorKind::kAbort && released.empty()) {
    ++st->detected;
  } else if (!released.empty() && released != want) {
    ++st->wrong_output;
  }
}

// Messages of each kind node 1 sends in an honest run.
std::map<MsgKind, int> CountMessages(SchemeCode code) {
  std::map<MsgKind, int> counts;
  std::mutex mu;
  SimOptions opts;
  opts.seed = KeyFromSeed(1);
  opts.nodes = Describe(code).compute_nodes();
  opts.party.triple_batch = 8;
  opts.setup = [&](Party& p) {
    if (p.node() != 1) return;
    p.SetTamper([&](MsgKind k, int, Vec& v) {
      if (v.empty()) return;
      std::lock_guard<std::mutex> lock(mu);
      ++counts[k];
    });
  };
  const std::vector<int64_t> xs = {3, -4, 5, 6, 100, -100};
  RunLocal(Ring::Prime64(), code, opts, [&](Party& p) {
    ShareVec x = In(p, xs);
    ShareVec y = In(p, xs, 1);
    ShareVec prod = TruncDet(p, Mul(p, x, y), 2, 32);
    ShareVec neg = Ltz(p, Add(p.ring(), x, y));
    RevealTo(p, 0, Concat(std::vector<ShareVec>{prod, neg}), 2 * xs.size());
  });
  return counts;
}

Outcome CheatDetection() {
  std::ostringstream os;
  bool ok = true;
  for (SchemeCode code : {SchemeCode::kActive2pc, SchemeCode::kActive3pc}) {
    std::vector<MsgKind> kinds = {MsgKind::kOpen, MsgKind::kBeaver};
    if (code == SchemeCode::kActive3pc) kinds.push_back(MsgKind::kSacrifice);
    const auto counts = CountMessages(code);
    CheatStats st;
    CheatTrial(code, MsgKind::kOpen, -1, 1, &st);  // honest baseline
    if (!st.honest_ok) return {false, std::string(SchemeCodeName(code)) + " honest run failed"};
    std::mt19937_64 rng(static_cast<uint64_t>(code) * 1000 + 1);
    for (int t = 0; t < 1000; ++t) {
      const MsgKind kind = kinds[t % kinds.size()];
      const int n = counts.count(kind) ? counts.at(kind) : 0;
      if (n == 0) return {false, std::string("no ") + MsgKindName(kind) + " messages sent"};
      CheatTrial(code, kind, static_cast<int>(rng() % n), 90000 + t, &st);
    }
    ok = ok && st.trials >= 1000 && st.detected >= 999 * st.trials / 1000 && st.wrong_output == 0;
    os << SchemeCodeName(code) << " " << st.detected << "/" << st.trials
       << " aborted before output (" << st.wrong_output << " wrong outputs); ";
  }
  return {ok, os.str()};
}

// --- Micro-oracles ------------------------------------------------------------------

Outcome MicroOracles() {
  std::ostringstream os;
  bool ok = true;
  std::vector<int64_t> xs;
  for (int64_t x = -1024; x <= 1024; ++x) xs.push_back(x);

  int ltz_bad = 0, trunc_bad = 0;
  for (const Combo& c : kCombos) {
    auto got = Compute(c, [&](Party& p) {
      ShareVec x = In(p, xs);
      std::vector<ShareVec> parts = {Ltz(p, x), Eqz(p, x)};
      for (int f = 1; f <= 8; ++f) parts.push_back(TruncDet(p, x, f, 32));
      return Out(p, Concat(parts));
    });
    const size_t n = xs.size();
    for (size_t i = 0; i < n; ++i) {
      ltz_bad += got[i] != (xs[i] < 0);
      ltz_bad += got[n + i] != (xs[i] == 0);
      for (int f = 1; f <= 8; ++f) trunc_bad += got[(1 + f) * n + i] != FloorShift(xs[i], f);
    }
  }
  ok = ok && ltz_bad == 0 && trunc_bad == 0;
  os << "ltz/eqz " << ltz_bad << " and trunc_det " << trunc_bad << " mismatches (6 combos); ";

  // Four residues, 25000 samples each, f = 8.
  int prob_fail = 0;
  double worst_sigma = 0;
  const int f = 8, per = 25000;
  const std::vector<int64_t> vals = {(5 << f) + 1, (5 << f) + 64, -(3 << f) + 128, 200};
  std::vector<int64_t> samples;
  for (int64_t v : vals) samples.insert(samples.end(), per, v);
  for (const Combo& c : kCombos) {
    auto got = Compute(c, [&](Party& p) { return Out(p, TruncProb(p, In(p, samples), f, 32)); });
    for (size_t k = 0; k < vals.size(); ++k) {
      const int64_t lo = FloorShift(vals[k], f);
      const double prob = static_cast<double>(vals[k] - lo * (1 << f)) / (1 << f);
      int ups = 0;
      for (int i = 0; i < per; ++i) {
        const int64_t g = got[k * per + i];
        if (g != lo && g != lo + 1) ++prob_fail;
        ups += g == lo + 1;
      }
      const double sigma = std::sqrt(per * prob * (1 - prob));
      const double z = std::abs(ups - per * prob) / sigma;
      worst_sigma = std::max(worst_sigma, z);
      if (z > 3) ++prob_fail;
    }
  }
  ok = ok && prob_fail == 0;
  os << "trunc_prob worst " << std::round(worst_sigma * 100) / 100 << " sigma over 10^5 samples ("
     << prob_fail << " failures); ";

  // 10^4 division cases; relative error measured against max(1, |q|).
  const int fd = 16;
  const double ulp = std::ldexp(1.0, -fd);
  std::mt19937_64 rng(21);
  std::vector<int64_t> enc, dens;
  for (int i = 0; i < 10000; ++i) {
    const int mag = static_cast<int>(rng() % 31);
    const int64_t v = static_cast<int64_t>(rng() % (uint64_t{1} << mag));
    enc.push_back(i % 2 ? v : -v);
    dens.push_back(static_cast<int64_t>(rng() % 64) + 1);
  }
  double worst_div = 0;
  for (const Combo& c : {kCombos[0], kCombos[3]}) {
    auto got = Compute(c, [&](Party& p) { return Out(p, DivSecret(p, In(p, enc), In(p, dens), fd)); });
    for (size_t i = 0; i < enc.size(); ++i) {
      const double q = static_cast<double>(enc[i]) * ulp / static_cast<double>(dens[i]);
      const double err = std::abs(static_cast<double>(got[i]) * ulp - q);
      worst_div = std::max(worst_div, err / std::max(1.0, std::abs(q)));
    }
  }
  ok = ok && worst_div <= std::ldexp(1.0, -14);
  os << "div_secret worst relative error 2^" << std::round(std::log2(worst_div) * 100) / 100
     << " over 10^4 cases; ";

  // 10^4 vectors of length 8 with many ties.
  const size_t groups = 10000, len = 8;
  std::vector<int64_t> av(groups * len);
  for (auto& v : av) v = static_cast<int64_t>(rng() % 16);
  int arg_bad = 0;
  for (const Combo& c : {kCombos[0], kCombos[3]}) {
    auto got = Compute(c, [&](Party& p) { return Out(p, Argmax(p, In(p, av), groups).index); });
    for (size_t g = 0; g < groups; ++g) {
      auto begin = av.begin() + g * len;
      arg_bad += got[g] != std::max_element(begin, begin + len) - begin;
    }
  }
  ok = ok && arg_bad == 0;
  os << "argmax " << arg_bad << " mismatches over 10^4 vectors";
  return {ok, os.str()};
}

// --- Rounds and bytes ----------------------------------------------------------------

Outcome RoundBudget() {
  std::ostringstream os;
  bool ok = true;
  for (const Combo& c : kCombos) {
    auto got = Compute(c, [&](Party& p) {
      ShareVec x = In(p, {3, 4, 5});
      ShareVec y = In(p, {6, 7, 8});
      Mul(p, x, x);  // fills the verified triple pool under active 3PC
      p.net().ResetCounters();
      ShareVec z = Mul(p, x, y);
      const auto rounds = static_cast<int64_t>(p.net().rounds());
      auto v = Out(p, z);
      v.push_back(rounds);
      return v;
    });
    ok = ok && got == std::vector<int64_t>({18, 28, 40, 1});
    os << "mul " << c.name() << " " << got.back() << " round; ";
  }
  for (const char* ring : {"prime64", "mod2k"}) {
    std::ostringstream out, err;
    const int code = RunCli({"bench", "--scheme", "semi-2pc", "--ring", ring, "--repeat", "2"},
                            out, err);
    const std::string s = out.str();
    std::vector<std::string> rounds;
    for (size_t at = s.find("\"rounds\":"); at != std::string::npos;
         at = s.find("\"rounds\":", at + 1)) {
      rounds.push_back(s.substr(at + 9, s.find_first_of(",}", at) - at - 9));
    }
    const bool stable = code == 0 && s.find("\"stable\":true") != std::string::npos &&
                        rounds.size() == 2 && rounds[0] == rounds[1];
    ok = ok && stable;
    os << "reference network semi-2pc/" << ring << " "
       << (rounds.empty() ? "?" : rounds[0]) << " rounds, bench "
       << (stable ? "stable" : "UNSTABLE") << "; ";
  }
  return {ok, os.str()};
}

}  // namespace
}  // namespace obliv1d

int main(int argc, char** argv) {
  using namespace obliv1d;
  std::string only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") only = argv[i + 1];
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle-equivalence", OracleEquivalence},
      {"worked-example", WorkedExample},
      {"truncation-gap", TruncationGap},
      {"cheat-detection", CheatDetection},
      {"micro-oracles", MicroOracles},
      {"round-budget", RoundBudget},
  };
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && only != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " ["
              << static_cast<int>(Seconds(t0)) << " s]" << std::endl;
  }
  return all ? 0 : 1;
}
