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

#include <gtest/gtest.h>

#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "obliv1d/protocols.h"
#include "obliv1d/runtime.h"

namespace obliv1d::testing {

struct Combo {
  SchemeCode code;
  bool prime;
  Ring ring() const { return prime ? Ring::Prime64() : Ring::Mod2k(); }
  std::string name() const {
    return std::string(SchemeCodeName(code)) + (prime ? "/prime64" : "/mod2k");
  }
};

inline std::vector<Combo> SupportedCombos() {
  return {{SchemeCode::kSemi2pc, true},  {SchemeCode::kSemi2pc, false},
          {SchemeCode::kSemi3pc, true},  {SchemeCode::kSemi3pc, false},
          {SchemeCode::kActive2pc, true}, {SchemeCode::kActive3pc, true}};
}

inline Key TestSeed(uint64_t n) { return KeyFromSeed(0x5eed0000 + n); }

// Runs fn on the compute nodes only. Every node's return value must agree;
// node 0's is returned. Fails the test if any node throws.
inline std::vector<int64_t> RunCompute(
    const Ring& ring, SchemeCode code,
    const std::function<std::vector<int64_t>(Party&)>& fn, SimOptions opts = {}) {
  opts.nodes = Describe(code).compute_nodes();
  std::mutex mu;
  std::map<int, std::vector<int64_t>> outs;
  auto results = RunLocal(ring, code, opts, [&](Party& p) {
    auto v = fn(p);
    std::lock_guard<std::mutex> lock(mu);
    outs[p.node()] = std::move(v);
  });
  if (const NodeResult* f = FirstFailure(results)) {
    ADD_FAILURE() << "node " << f->node << " failed (" << ErrorKindName(f->error)
                  << "): " << f->message;
    return {};
  }
  for (auto& [node, v] : outs) {
    EXPECT_EQ(v, outs[0]) << "node " << node << " disagrees";
  }
  return outs[0];
}

// Shares signed values owned by `owner`.
inline ShareVec In(Party& p, const std::vector<int64_t>& v, int owner = 0) {
  Vec enc(v.size());
  for (size_t i = 0; i < v.size(); ++i) enc[i] = p.ring().FromSigned(v[i]);
  return InputFrom(p, owner, v.size(), p.node() == owner ? &enc : nullptr);
}

// Opens, verifies MACs, and decodes as signed.
inline std::vector<int64_t> Out(Party& p, const ShareVec& x) {
  Vec v = Open(p, x);
  MacCheckFlush(p);
  std::vector<int64_t> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<int64_t>(p.ring().ToSigned(v[i]));
  }
  return out;
}

// Floor division by 2^m on signed values.
inline int64_t FloorShift(int64_t x, int m) {
  return x >= 0 ? x >> m : -((-x + (int64_t{1} << m) - 1) >> m);
}

}  // namespace obliv1d::testing
