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

#include "obliv1d/crypto.h"

#include <sodium.h>

#include <cstring>
#include <mutex>

namespace obliv1d {
namespace {

void EnsureSodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  });
}

}  // namespace

Digest Sha256(std::span<const uint8_t> data) {
  EnsureSodium();
  Digest d;
  crypto_hash_sha256(d.data(), data.data(), data.size());
  return d;
}

std::string HexEncode(std::span<const uint8_t> data) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (uint8_t b : data) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 15]);
  }
  return s;
}

bool HexDecode(std::string_view hex, std::vector<uint8_t>& out) {
  if (hex.size() % 2) return false;
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  out.clear();
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = nib(hex[i]), lo = nib(hex[i + 1]);
    if (hi < 0 || lo < 0) return false;
    out.push_back(static_cast<uint8_t>(hi << 4 | lo));
  }
  return true;
}

Key DeriveKey(const Key& parent, std::string_view label) {
  std::vector<uint8_t> buf(parent.begin(), parent.end());
  buf.insert(buf.end(), label.begin(), label.end());
  return Sha256(buf);
}

Key KeyFromSeed(uint64_t seed) {
  std::string s = "obliv1d-seed:" + std::to_string(seed);
  return Sha256({reinterpret_cast<const uint8_t*>(s.data()), s.size()});
}

Key RandomKey() {
  EnsureSodium();
  Key k;
  randombytes_buf(k.data(), k.size());
  return k;
}

Prg::Prg(const Key& key) : key_(key) { EnsureSodium(); }

void Prg::Refill() {
  // 64-byte ChaCha20 blocks; the IETF variant takes a 32-bit block counter,
  // so the upper counter bits go into the nonce.
  std::array<uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  uint64_t hi = block_ >> 24;
  std::memcpy(nonce.data(), &hi, sizeof(hi));
  uint32_t ic = static_cast<uint32_t>(block_ & 0xffffff) * 8;
  buf_.fill(0);
  crypto_stream_chacha20_ietf_xor_ic(buf_.data(), buf_.data(), buf_.size(),
                                     nonce.data(), ic, key_.data());
  ++block_;
  pos_ = 0;
}

void Prg::Fill(std::span<uint8_t> out) {
  size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buf_.size()) Refill();
    size_t n = std::min(out.size() - done, buf_.size() - pos_);
    std::memcpy(out.data() + done, buf_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

uint64_t Prg::NextU64() {
  uint64_t v;
  Fill({reinterpret_cast<uint8_t*>(&v), sizeof(v)});
  return v;
}

u128 Prg::UniformBits(int bits) {
  if (bits <= 0) return 0;
  u128 v = (u128{NextU64()} << 64) | NextU64();
  if (bits >= 128) return v;
  return v & ((u128{1} << bits) - 1);
}

u128 Prg::Uniform(const Ring& ring) {
  if (!ring.is_prime()) return UniformBits(ring.k());
  const uint64_t p = ring.prime();
  // Largest multiple of p that fits in 64 bits bounds the rejection region.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % p + 1) % p;
  for (;;) {
    uint64_t v = NextU64();
    if (v <= limit) return v % p;
  }
}

Vec Prg::Uniform(const Ring& ring, size_t n) {
  Vec out(n);
  for (auto& v : out) v = Uniform(ring);
  return out;
}

uint8_t Prg::Bit() {
  uint8_t b;
  Fill({&b, 1});
  return b & 1;
}

}  // namespace obliv1d
