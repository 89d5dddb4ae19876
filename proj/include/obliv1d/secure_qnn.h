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

#include <vector>

#include "obliv1d/protocols.h"
#include "obliv1d/qnn.h"

namespace obliv1d {

// The model owner's parameters as shares held by the compute nodes.
struct SharedModel {
  struct Params {
    ShareVec weights;  // conv: F x (D*L); dense: outputs x inputs; centered
    ShareVec bias;
    ShareVec m0, shift, zero;  // one element each
    ShareVec divisor;          // secret pool window
  };
  QuantizedModel arch;
  std::vector<Params> layers;
};

// Flattened parameter vector the owner inputs, in SharedModel order.
Vec EncodeSecretParams(const Ring& ring, const QuantizedModel& full);

// Inputs the owner's parameters. Every node passes the architecture; the
// owner also passes the full model. Non-compute non-owners get an empty
// result.
SharedModel ShareModel(Party& p, const QuantizedModel& arch, int owner,
                       const QuantizedModel* full);

struct SecureInferOptions {
  TruncMode trunc = TruncMode::kDeterministic;
  // Opens every layer's activations to the compute nodes. Leaks; for
  // testing only.
  bool debug_reveal = false;
};

// Per input, per layer activations opened under debug_reveal, in the same
// layout as PlainTrace.
struct SecureTrace {
  std::vector<std::vector<std::vector<int64_t>>> inputs;
};

// Runs `batch` inputs (input-major shares of uint8 values) through the
// network on the compute nodes. Returns shares of the class indices.
ShareVec SecureInfer(Party& p, const SharedModel& m, const ShareVec& inputs,
                     size_t batch, const SecureInferOptions& opts = {},
                     SecureTrace* trace = nullptr);

// Building blocks, exposed for tests.

// Integer convolution accumulators (filters x length x batch) of centered
// inputs (depth x length x batch) with centered weights (filters x depth*width).
ShareVec SecureConvAccumulate(Party& p, const ShareVec& centered, int depth, int length,
                              size_t batch, const ShareVec& weights, int filters,
                              int width, const ShareVec& bias, Padding padding);

// clamp(zero + floor(acc * m0 / 2^(31 + shift)), lo, 255).
ShareVec SecureRequantize(Party& p, const ShareVec& acc, const ShareVec& m0,
                          const ShareVec& shift, const ShareVec& zero, bool relu,
                          TruncMode mode);

// round-half-up(window sum / P) per channel and batch element; `divisor`
// is a one-element share for the secret mode, empty for the public one.
ShareVec SecureAvgPool(Party& p, const ShareVec& x, int channels, int length,
                       size_t batch, int window, const ShareVec* divisor);

}  // namespace obliv1d
