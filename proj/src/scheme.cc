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

#include "obliv1d/scheme.h"

namespace obliv1d {

std::vector<int> SchemeInfo::compute_nodes() const {
  std::vector<int> v;
  for (int i = 0; i < num_parties; ++i) v.push_back(i);
  return v;
}

std::vector<int> SchemeInfo::all_nodes() const {
  std::vector<int> v;
  for (int i = 0; i < num_nodes(); ++i) v.push_back(i);
  return v;
}

Role SchemeInfo::RoleOf(int node) const {
  if (node == alice()) return Role::kAlice;
  if (node == bob()) return Role::kBob;
  if (node == third_party()) return Role::kThirdParty;
  if (is_compute(node)) return Role::kServer;
  throw UsageError("node " + std::to_string(node) + " is not part of the topology");
}

SchemeInfo Describe(SchemeCode code) {
  switch (code) {
    case SchemeCode::kSemi2pc:
      return {code, Scheme::kAdditive, 2, false};
    case SchemeCode::kActive2pc:
      return {code, Scheme::kAuthenticated, 2, true};
    case SchemeCode::kSemi3pc:
      return {code, Scheme::kReplicated, 3, false};
    case SchemeCode::kActive3pc:
      return {code, Scheme::kReplicated, 3, true};
  }
  throw UsageError("unknown scheme code");
}

const char* SchemeCodeName(SchemeCode code) {
  switch (code) {
    case SchemeCode::kSemi2pc:
      return "semi-2pc";
    case SchemeCode::kActive2pc:
      return "active-2pc";
    case SchemeCode::kSemi3pc:
      return "semi-3pc";
    case SchemeCode::kActive3pc:
      return "active-3pc";
  }
  return "?";
}

SchemeCode ParseSchemeCode(std::string_view s) {
  for (auto c : {SchemeCode::kSemi2pc, SchemeCode::kActive2pc, SchemeCode::kSemi3pc,
                 SchemeCode::kActive3pc}) {
    if (s == SchemeCodeName(c)) return c;
  }
  throw UsageError("unknown scheme '" + std::string(s) +
                   "' (expected semi-2pc, active-2pc, semi-3pc or active-3pc)");
}

void CheckSupported(SchemeCode code, const Ring& ring) {
  if (Describe(code).active && !ring.is_prime()) {
    throw UsageError(std::string(SchemeCodeName(code)) +
                     " is only supported over the prime field");
  }
}

Ring ParseRing(std::string_view s) {
  if (s == "prime64") return Ring::Prime64();
  if (s == "mod2k") return Ring::Mod2k();
  throw UsageError("unknown ring '" + std::string(s) + "' (expected prime64 or mod2k)");
}

std::string RingFlagName(const Ring& ring) {
  return ring.is_prime() ? "prime64" : "mod2k";
}

int ParseRoleNode(SchemeCode code, std::string_view role) {
  SchemeInfo info = Describe(code);
  if (role == "alice") return info.alice();
  if (role == "bob") return info.bob();
  if (role == "third-party") return info.third_party();
  if (info.num_parties == 3) {
    if (role == "s1") return 0;
    if (role == "s2") return 1;
    if (role == "s3") return 2;
  }
  throw UsageError("role '" + std::string(role) + "' is not valid for " +
                   SchemeCodeName(code));
}

std::string NodeName(SchemeCode code, int node) {
  SchemeInfo info = Describe(code);
  if (node == info.alice()) return "alice";
  if (node == info.bob()) return "bob";
  if (node == info.third_party()) return "third-party";
  return "s" + std::to_string(node + 1);
}

}  // namespace obliv1d
