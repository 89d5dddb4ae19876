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
#include <vector>

#include "obliv1d/qnn.h"

namespace obliv1d {

// Text formats; see docs/formats.md for the grammar.
inline constexpr const char* kModelMagic = "obliv1d-qmodel";
inline constexpr const char* kVectorMagic = "obliv1d-qvec";
inline constexpr const char* kTestMagic = "obliv1d-qtest";
inline constexpr int kFormatVersion = 1;

// Canonical serialization, ending with a "checksum sha256:<hex>" line over
// every preceding byte. Validates first.
std::string SerializeModel(const QuantizedModel& m);
// Parses and validates. Throws ValidationError with line numbers.
QuantizedModel ParseModel(const std::string& text);
// Hex SHA-256 of the canonical body.
std::string ModelChecksum(const QuantizedModel& m);

void WriteModel(const std::string& path, const QuantizedModel& m);
QuantizedModel LoadModel(const std::string& path);

// Quantized input vector, optionally bound to a model checksum.
struct InputVector {
  std::vector<int64_t> values;
  std::string model_checksum;  // empty when unbound
};
std::string SerializeInput(const InputVector& v);
InputVector ParseInput(const std::string& text);
void WriteInput(const std::string& path, const InputVector& v);
// Loads and, when `model` is given, checks the length and any binding.
InputVector LoadInput(const std::string& path, const QuantizedModel* model = nullptr);

struct TestCase {
  std::vector<int64_t> input;
  int label = -1;
  // Activations after each layer, as produced by InferPlain.
  std::vector<std::vector<int64_t>> layers;
};
struct TestVectors {
  std::string model_checksum;
  std::vector<TestCase> cases;
};
std::string SerializeTestVectors(const TestVectors& t);
TestVectors ParseTestVectors(const std::string& text);
void WriteTestVectors(const std::string& path, const TestVectors& t);
// Refuses vectors bound to a different model.
TestVectors LoadTestVectors(const std::string& path, const QuantizedModel& model);

// Deterministic random model from a comma-separated shape string, e.g.
// "conv:8x3,pool:2,conv:8x3,dense:4". Items:
//   conv:FxL[:trailing]   pool:P[:secret]   flatten   dense:O
// A flatten is inserted before a dense layer on multi-channel input and an
// argmax layer is appended. Throws ValidationError on grammar errors or
// when an accumulator bound would reach 2^31.
QuantizedModel GenRandomModel(const std::string& shape, uint64_t seed,
                              int input_length = 40);

// Uniform uint8 inputs for a model.
std::vector<std::vector<int64_t>> GenRandomInputs(const QuantizedModel& m, size_t count,
                                                  uint64_t seed);

// Oracle outputs for the given inputs.
TestVectors MakeTestVectors(const QuantizedModel& m,
                            const std::vector<std::vector<int64_t>>& inputs);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& data);

}  // namespace obliv1d
