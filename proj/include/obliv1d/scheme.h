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
#include <string>
#include <string_view>
#include <vector>

#include "obliv1d/ring.h"
#include "obliv1d/sharing.h"

namespace obliv1d {

enum class SchemeCode : uint8_t {
  kSemi2pc = 0,
  kActive2pc = 1,
  kSemi3pc = 2,
  kActive3pc = 3,
};

enum class Role { kAlice, kBob, kThirdParty, kServer };

// Node numbering.
//   2PC: 0 = Alice, 1 = Bob (both compute), 2 = third-party receiver.
//   3PC: 0..2 = servers, 3 = Alice, 4 = Bob, 5 = third-party receiver.
// Compute parties are always nodes 0..num_parties-1.
struct SchemeInfo {
  SchemeCode code = SchemeCode::kSemi2pc;
  Scheme share_scheme = Scheme::kAdditive;
  int num_parties = 2;
  bool active = false;

  int alice() const { return num_parties == 2 ? 0 : 3; }
  int bob() const { return num_parties == 2 ? 1 : 4; }
  int third_party() const { return num_parties == 2 ? 2 : 5; }
  int num_nodes() const { return num_parties == 2 ? 3 : 6; }
  bool is_compute(int node) const { return node >= 0 && node < num_parties; }
  std::vector<int> compute_nodes() const;
  std::vector<int> all_nodes() const;
  Role RoleOf(int node) const;
};

SchemeInfo Describe(SchemeCode code);
const char* SchemeCodeName(SchemeCode code);
// "semi-2pc", "active-2pc", "semi-3pc", "active-3pc".
SchemeCode ParseSchemeCode(std::string_view s);
// Throws UsageError for the unsupported active x Z_2^k combinations.
void CheckSupported(SchemeCode code, const Ring& ring);

// "prime64" or "mod2k" with the default parameters.
Ring ParseRing(std::string_view s);
std::string RingFlagName(const Ring& ring);

// Node id for "alice", "bob", "third-party", "s1".."s3" under `code`.
int ParseRoleNode(SchemeCode code, std::string_view role);
std::string NodeName(SchemeCode code, int node);

}  // namespace obliv1d
