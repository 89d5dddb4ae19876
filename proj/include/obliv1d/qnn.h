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
#include <variant>
#include <vector>

namespace obliv1d {

// Affine quantization: real = scale * (q - zero_point).
struct QuantParams {
  double scale = 1.0;
  int32_t zero_point = 0;
  bool operator==(const QuantParams&) const = default;
};

// Nearest representable value, ties toward the smaller real; values
// outside [0, 255] saturate.
int32_t QuantizeValue(double real, const QuantParams& qp);
double DequantizeValue(int32_t q, const QuantParams& qp);

// M ~= m0 * 2^-(31 + shift) with m0 in [2^30, 2^31).
struct Requant {
  int64_t m0 = int64_t{1} << 30;
  int32_t shift = 0;
  bool operator==(const Requant&) const = default;
};
inline constexpr int kMaxRequantShift = 31;

// Throws ValidationError unless 0 < multiplier < 1 and the shift fits.
Requant RequantFromMultiplier(double multiplier);
double RequantMultiplier(const Requant& rq);

enum class Padding { kSameCentered, kTrailing };
enum class DivisorVisibility { kPublic, kSecret };

const char* PaddingName(Padding p);
const char* DivisorName(DivisorVisibility d);

struct ConvLayer {
  int filters = 0;
  int width = 0;
  int depth = 0;
  Padding padding = Padding::kSameCentered;
  bool relu = true;
  std::vector<int32_t> weights;  // filters x depth x width, int8
  QuantParams weight_qp;         // zero point in [-128, 127]
  std::vector<int64_t> bias;     // int32, scale = in_scale * weight_scale
  QuantParams out_qp;
  Requant rq;
  bool operator==(const ConvLayer&) const = default;
};

struct PoolLayer {
  int window = 1;
  DivisorVisibility divisor = DivisorVisibility::kPublic;
  bool operator==(const PoolLayer&) const = default;
};

// Position-major: element (channel c, position j) goes to j * C + c.
struct FlattenLayer {
  bool operator==(const FlattenLayer&) const = default;
};

struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  bool relu = false;
  std::vector<int32_t> weights;  // inputs x outputs, int8
  QuantParams weight_qp;
  std::vector<int64_t> bias;
  QuantParams out_qp;
  Requant rq;
  bool operator==(const DenseLayer&) const = default;
};

struct ArgmaxLayer {
  bool operator==(const ArgmaxLayer&) const = default;
};

using Layer = std::variant<ConvLayer, PoolLayer, FlattenLayer, DenseLayer, ArgmaxLayer>;

const char* LayerKindName(const Layer& l);

// Activation shape: channels x length, stored channel-major.
struct Shape {
  int channels = 1;
  int length = 0;
  int size() const { return channels * length; }
  bool operator==(const Shape&) const = default;
};

struct QuantizedModel {
  std::string name = "model";
  std::string version = "1";
  int input_length = 0;
  QuantParams input_qp;
  std::vector<Layer> layers;
  std::vector<std::string> labels;
  // False for an architecture-only view (all parameter vectors empty).
  bool has_params = true;
  bool operator==(const QuantizedModel&) const = default;
};

// Output shape after each layer (index i -> shape after layers[i]).
std::vector<Shape> LayerShapes(const QuantizedModel& m);
int NumClasses(const QuantizedModel& m);

// Checks structure, shapes, value ranges and the static accumulator bound
// |acc| < 2^31. Throws ValidationError naming the layer and field.
void ValidateModel(const QuantizedModel& m);

// Largest possible |accumulator| of a conv or dense layer.
int64_t AccumulatorBound(const Layer& l);

// Copy with every secret parameter removed; what non-owners see.
QuantizedModel Architecture(const QuantizedModel& m);

// Number of ring elements the model owner inputs for the secure engine.
size_t SecretParamCount(const QuantizedModel& arch);

// --- Plaintext integer oracle ---------------------------------------------

// Raw convolution accumulators sum (x - x_zero) * (w - w_zero) + bias,
// filters x length, with x given depth x length.
std::vector<int64_t> ConvAccumulate(const std::vector<int64_t>& x, int depth, int length,
                                    const std::vector<int64_t>& w, int filters, int width,
                                    const std::vector<int64_t>& bias, Padding padding,
                                    int64_t x_zero = 0, int64_t w_zero = 0);

// clamp(zero + floor(acc * m0 / 2^(31 + shift)), lo, 255) with lo = zero
// under RELU and 0 otherwise.
int64_t RequantizeValue(int64_t acc, const Requant& rq, int32_t zero, bool relu);

// round-half-up(sum / P) over non-overlapping windows; a tail shorter than
// P is dropped.
std::vector<int64_t> AvgPoolInt(const std::vector<int64_t>& x, int channels, int length,
                                int window);

struct PlainTrace {
  // Activations after each layer; the argmax layer records the class.
  std::vector<std::vector<int64_t>> layers;
  int label = -1;
};

// Layer i alone, applied to the activations after layer i - 1.
std::vector<int64_t> ApplyPlainLayer(const QuantizedModel& m, size_t i,
                                     const std::vector<int64_t>& act);

PlainTrace InferPlain(const QuantizedModel& m, const std::vector<int64_t>& input);

}  // namespace obliv1d
