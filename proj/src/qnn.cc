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

#include "obliv1d/qnn.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "obliv1d/errors.h"

namespace obliv1d {
namespace {

constexpr int64_t kAccLimit = int64_t{1} << 31;

[[noreturn]] void Invalid(size_t layer, const std::string& what) {
  throw ValidationError("layer " + std::to_string(layer) + ": " + what);
}

void CheckQuant(size_t layer, const char* field, const QuantParams& qp, int lo, int hi) {
  if (!(qp.scale > 0) || !std::isfinite(qp.scale)) {
    Invalid(layer, std::string(field) + " scale must be positive");
  }
  if (qp.zero_point < lo || qp.zero_point > hi) {
    Invalid(layer, std::string(field) + " zero point " + std::to_string(qp.zero_point) +
                       " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

void CheckRequant(size_t layer, const Requant& rq) {
  if (rq.m0 < (int64_t{1} << 30) || rq.m0 >= (int64_t{1} << 31)) {
    Invalid(layer, "requant m0 " + std::to_string(rq.m0) + " outside [2^30, 2^31)");
  }
  if (rq.shift < 0 || rq.shift > kMaxRequantShift) {
    Invalid(layer, "requant shift " + std::to_string(rq.shift) + " outside [0, 31]");
  }
}

void CheckWeights(size_t layer, const std::vector<int32_t>& w, size_t n) {
  if (w.size() != n) {
    Invalid(layer, "weights has " + std::to_string(w.size()) + " values, expected " +
                       std::to_string(n));
  }
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] < -128 || w[i] > 127) {
      Invalid(layer, "weights[" + std::to_string(i) + "] = " + std::to_string(w[i]) +
                         " outside int8 range");
    }
  }
}

void CheckBias(size_t layer, const std::vector<int64_t>& b, size_t n) {
  if (b.size() != n) {
    Invalid(layer, "bias has " + std::to_string(b.size()) + " values, expected " +
                       std::to_string(n));
  }
  for (size_t i = 0; i < b.size(); ++i) {
    if (b[i] < INT32_MIN || b[i] > INT32_MAX) {
      Invalid(layer, "bias[" + std::to_string(i) + "] outside int32 range");
    }
  }
}

// Max over output units of sum_i |w_i - z_w| * 255 + |b|.
int64_t DotBound(const std::vector<int32_t>& w, int32_t wz, const std::vector<int64_t>& b,
                 int units, int fan_in, bool unit_major) {
  if (w.empty()) return int64_t{255} * 255 * fan_in + kAccLimit / 2;
  int64_t worst = 0;
  for (int u = 0; u < units; ++u) {
    int64_t s = 0;
    for (int i = 0; i < fan_in; ++i) {
      const int32_t wv = unit_major ? w[static_cast<size_t>(u) * fan_in + i]
                                    : w[static_cast<size_t>(i) * units + u];
      s += std::abs(static_cast<int64_t>(wv) - wz) * 255;
    }
    s += b.empty() ? 0 : std::abs(b[u]);
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace

int32_t QuantizeValue(double real, const QuantParams& qp) {
  const double t = real / qp.scale;
  // Nearest integer with ties going down.
  const double q = std::ceil(t - 0.5) + qp.zero_point;
  return static_cast<int32_t>(std::clamp(q, 0.0, 255.0));
}

double DequantizeValue(int32_t q, const QuantParams& qp) {
  return qp.scale * (q - qp.zero_point);
}

Requant RequantFromMultiplier(double multiplier) {
  if (!(multiplier > 0) || !(multiplier < 1)) {
    throw ValidationError("requant multiplier must lie in (0, 1)");
  }
  int shift = 0;
  double m = multiplier;
  while (m < 0.5) {
    m *= 2;
    ++shift;
  }
  int64_t m0 = std::llround(m * std::ldexp(1.0, 31));
  if (m0 == (int64_t{1} << 31)) {
    m0 >>= 1;
    --shift;
  }
  if (shift < 0 || shift > kMaxRequantShift) {
    throw ValidationError("requant multiplier needs a shift outside [0, 31]");
  }
  return {m0, shift};
}

double RequantMultiplier(const Requant& rq) {
  return std::ldexp(static_cast<double>(rq.m0), -31 - rq.shift);
}

const char* PaddingName(Padding p) {
  return p == Padding::kTrailing ? "trailing" : "same_centered";
}

const char* DivisorName(DivisorVisibility d) {
  return d == DivisorVisibility::kSecret ? "secret" : "public";
}

const char* LayerKindName(const Layer& l) {
  switch (l.index()) {
    case 0:
      return "conv";
    case 1:
      return "pool";
    case 2:
      return "flatten";
    case 3:
      return "dense";
    default:
      return "argmax";
  }
}

std::vector<Shape> LayerShapes(const QuantizedModel& m) {
  std::vector<Shape> out;
  Shape s{1, m.input_length};
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      if (c->depth != s.channels) {
        Invalid(i, "conv depth " + std::to_string(c->depth) + " does not match " +
                       std::to_string(s.channels) + " input channels");
      }
      s = {c->filters, s.length};
    } else if (auto* p = std::get_if<PoolLayer>(&l)) {
      if (p->window < 1 || p->window > s.length) {
        Invalid(i, "pool window " + std::to_string(p->window) + " exceeds width " +
                       std::to_string(s.length));
      }
      s = {s.channels, s.length / p->window};
    } else if (std::holds_alternative<FlattenLayer>(l)) {
      s = {1, s.size()};
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      if (s.channels != 1) Invalid(i, "dense input must be flattened first");
      if (d->inputs != s.length) {
        Invalid(i, "dense expects " + std::to_string(d->inputs) + " inputs, got " +
                       std::to_string(s.length));
      }
      s = {1, d->outputs};
    } else {
      if (s.channels != 1) Invalid(i, "argmax input must be a vector");
    }
    out.push_back(s);
  }
  return out;
}

int NumClasses(const QuantizedModel& m) {
  auto shapes = LayerShapes(m);
  return shapes.empty() ? 0 : shapes.back().length;
}

int64_t AccumulatorBound(const Layer& l) {
  if (auto* c = std::get_if<ConvLayer>(&l)) {
    return DotBound(c->weights, c->weight_qp.zero_point, c->bias, c->filters,
                    c->depth * c->width, true);
  }
  if (auto* d = std::get_if<DenseLayer>(&l)) {
    return DotBound(d->weights, d->weight_qp.zero_point, d->bias, d->outputs, d->inputs,
                    false);
  }
  return 0;
}

void ValidateModel(const QuantizedModel& m) {
  if (m.input_length < 1) throw ValidationError("input length must be positive");
  if (m.input_qp.scale <= 0 || m.input_qp.zero_point < 0 || m.input_qp.zero_point > 255) {
    throw ValidationError("input quantization parameters out of range");
  }
  if (m.layers.empty() || !std::holds_alternative<ArgmaxLayer>(m.layers.back())) {
    throw ValidationError("last layer must be argmax");
  }
  if (!std::holds_alternative<ConvLayer>(m.layers[0]) &&
      !std::holds_alternative<DenseLayer>(m.layers[0])) {
    throw ValidationError("layer 0: first layer must be conv or dense");
  }
  auto shapes = LayerShapes(m);
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    if (std::holds_alternative<ArgmaxLayer>(l) && i + 1 != m.layers.size()) {
      Invalid(i, "argmax must be the last layer");
    }
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      if (c->filters < 1 || c->width < 1) Invalid(i, "conv needs filters and width >= 1");
      CheckQuant(i, "weight", c->weight_qp, -128, 127);
      CheckQuant(i, "output", c->out_qp, 0, 255);
      if (m.has_params) {
        CheckWeights(i, c->weights, static_cast<size_t>(c->filters) * c->depth * c->width);
        CheckBias(i, c->bias, c->filters);
        CheckRequant(i, c->rq);
      }
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      if (d->outputs < 1) Invalid(i, "dense needs at least one output");
      CheckQuant(i, "weight", d->weight_qp, -128, 127);
      CheckQuant(i, "output", d->out_qp, 0, 255);
      if (m.has_params) {
        CheckWeights(i, d->weights, static_cast<size_t>(d->inputs) * d->outputs);
        CheckBias(i, d->bias, d->outputs);
        CheckRequant(i, d->rq);
      }
    } else if (auto* p = std::get_if<PoolLayer>(&l)) {
      if (p->divisor == DivisorVisibility::kSecret && p->window > 64) {
        Invalid(i, "secret pool window must be at most 64");
      }
    }
    const int64_t bound = AccumulatorBound(l);
    if (bound >= kAccLimit) {
      Invalid(i, "accumulator bound " + std::to_string(bound) + " reaches 2^31");
    }
  }
  if (!m.labels.empty() && static_cast<int>(m.labels.size()) != shapes.back().length) {
    throw ValidationError("label count " + std::to_string(m.labels.size()) +
                          " differs from class count " +
                          std::to_string(shapes.back().length));
  }
}

QuantizedModel Architecture(const QuantizedModel& m) {
  QuantizedModel a = m;
  a.has_params = false;
  for (Layer& l : a.layers) {
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      c->weights.clear();
      c->bias.clear();
      c->weight_qp = {};
      c->out_qp = {};
      c->rq = {};
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      d->weights.clear();
      d->bias.clear();
      d->weight_qp = {};
      d->out_qp = {};
      d->rq = {};
    }
  }
  return a;
}

size_t SecretParamCount(const QuantizedModel& arch) {
  size_t n = 0;
  for (const Layer& l : arch.layers) {
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      n += static_cast<size_t>(c->filters) * c->depth * c->width + c->filters + 3;
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      n += static_cast<size_t>(d->inputs) * d->outputs + d->outputs + 3;
    } else if (auto* p = std::get_if<PoolLayer>(&l)) {
      if (p->divisor == DivisorVisibility::kSecret) n += 1;
    }
  }
  return n;
}

std::vector<int64_t> ConvAccumulate(const std::vector<int64_t>& x, int depth, int length,
                                    const std::vector<int64_t>& w, int filters, int width,
                                    const std::vector<int64_t>& bias, Padding padding,
                                    int64_t x_zero, int64_t w_zero) {
  const int left = padding == Padding::kTrailing ? 0 : (width - 1) / 2;
  std::vector<int64_t> out(static_cast<size_t>(filters) * length);
  for (int f = 0; f < filters; ++f) {
    for (int j = 0; j < length; ++j) {
      int64_t acc = bias[f];
      for (int d = 0; d < depth; ++d) {
        for (int l = 0; l < width; ++l) {
          const int pos = j + l - left;
          if (pos < 0 || pos >= length) continue;  // padding holds x_zero
          acc += (x[static_cast<size_t>(d) * length + pos] - x_zero) *
                 (w[(static_cast<size_t>(f) * depth + d) * width + l] - w_zero);
        }
      }
      out[static_cast<size_t>(f) * length + j] = acc;
    }
  }
  return out;
}

int64_t RequantizeValue(int64_t acc, const Requant& rq, int32_t zero, bool relu) {
  const __int128 prod = static_cast<__int128>(acc) * rq.m0;
  const int64_t scaled = static_cast<int64_t>(prod >> (31 + rq.shift));
  const int64_t lo = relu ? zero : 0;
  return std::clamp<int64_t>(scaled + zero, lo, 255);
}

std::vector<int64_t> AvgPoolInt(const std::vector<int64_t>& x, int channels, int length,
                                int window) {
  const int out_len = length / window;
  std::vector<int64_t> out(static_cast<size_t>(channels) * out_len);
  for (int c = 0; c < channels; ++c) {
    for (int j = 0; j < out_len; ++j) {
      int64_t s = 0;
      for (int t = 0; t < window; ++t) s += x[static_cast<size_t>(c) * length + j * window + t];
      // floor((2s + P) / 2P) for s >= 0.
      out[static_cast<size_t>(c) * out_len + j] = (2 * s + window) / (2 * window);
    }
  }
  return out;
}

std::vector<int64_t> ApplyPlainLayer(const QuantizedModel& m, size_t i,
                                     const std::vector<int64_t>& act) {
  if (i >= m.layers.size()) throw UsageError("layer index out of range");
  Shape s{1, m.input_length};
  int32_t zero = m.input_qp.zero_point;
  const auto shapes = LayerShapes(m);
  if (i > 0) s = shapes[i - 1];
  for (size_t j = 0; j < i; ++j) {
    if (auto* c = std::get_if<ConvLayer>(&m.layers[j])) zero = c->out_qp.zero_point;
    if (auto* d = std::get_if<DenseLayer>(&m.layers[j])) zero = d->out_qp.zero_point;
  }
  if (static_cast<int>(act.size()) != s.size()) {
    throw ValidationError("layer " + std::to_string(i) + ": input has " +
                          std::to_string(act.size()) + " values, expected " +
                          std::to_string(s.size()));
  }
  const Layer& l = m.layers[i];
  if (auto* c = std::get_if<ConvLayer>(&l)) {
    std::vector<int64_t> w(c->weights.begin(), c->weights.end());
    auto acc = ConvAccumulate(act, c->depth, s.length, w, c->filters, c->width, c->bias,
                              c->padding, zero, c->weight_qp.zero_point);
    for (auto& v : acc) v = RequantizeValue(v, c->rq, c->out_qp.zero_point, c->relu);
    return acc;
  }
  if (auto* p = std::get_if<PoolLayer>(&l)) {
    return AvgPoolInt(act, s.channels, s.length, p->window);
  }
  if (std::holds_alternative<FlattenLayer>(l)) {
    std::vector<int64_t> flat(act.size());
    for (int c = 0; c < s.channels; ++c) {
      for (int j = 0; j < s.length; ++j) {
        flat[static_cast<size_t>(j) * s.channels + c] =
            act[static_cast<size_t>(c) * s.length + j];
      }
    }
    return flat;
  }
  if (auto* d = std::get_if<DenseLayer>(&l)) {
    std::vector<int64_t> out(d->outputs);
    for (int o = 0; o < d->outputs; ++o) {
      int64_t acc = d->bias[o];
      for (int k = 0; k < d->inputs; ++k) {
        acc += (act[k] - zero) *
               (d->weights[static_cast<size_t>(k) * d->outputs + o] - d->weight_qp.zero_point);
      }
      out[o] = RequantizeValue(acc, d->rq, d->out_qp.zero_point, d->relu);
    }
    return out;
  }
  return {static_cast<int64_t>(std::max_element(act.begin(), act.end()) - act.begin())};
}

PlainTrace InferPlain(const QuantizedModel& m, const std::vector<int64_t>& input) {
  if (!m.has_params) throw UsageError("plaintext inference needs model parameters");
  if (static_cast<int>(input.size()) != m.input_length) {
    throw ValidationError("input has " + std::to_string(input.size()) +
                          " values, model expects " + std::to_string(m.input_length));
  }
  PlainTrace tr;
  std::vector<int64_t> act = input;
  for (size_t i = 0; i < m.layers.size(); ++i) {
    act = ApplyPlainLayer(m, i, act);
    tr.layers.push_back(act);
  }
  tr.label = static_cast<int>(act.at(0));
  return tr;
}

}  // namespace obliv1d
