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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obliv1d/ring.h"

namespace obliv1d {

using Key = std::array<uint8_t, 32>;
using Digest = std::array<uint8_t, 32>;

Digest Sha256(std::span<const uint8_t> data);
std::string HexEncode(std::span<const uint8_t> data);
bool HexDecode(std::string_view hex, std::vector<uint8_t>& out);

// Derives a key from a parent key and a domain label. Used to give every
// stream (party PRG, dealer item kind, PRSS key) its own independent key.
Key DeriveKey(const Key& parent, std::string_view label);
Key KeyFromSeed(uint64_t seed);

// Counter-mode ChaCha20 keystream. Deterministic for a given key.
class Prg {
 public:
  explicit Prg(const Key& key);

  void Fill(std::span<uint8_t> out);
  uint64_t NextU64();
  // Uniform element of the ring (rejection sampling for Z_p).
  u128 Uniform(const Ring& ring);
  Vec Uniform(const Ring& ring, size_t n);
  // Uniform integer in [0, 2^bits), bits <= 127.
  u128 UniformBits(int bits);
  uint8_t Bit();

 private:
  void Refill();

  Key key_;
  uint64_t block_ = 0;
  std::array<uint8_t, 512> buf_{};
  size_t pos_ = 512;
};

// Fresh key from the operating system RNG.
Key RandomKey();

}  // namespace obliv1d
