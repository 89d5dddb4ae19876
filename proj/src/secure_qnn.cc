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

#include "obliv1d/secure_qnn.h"

namespace obliv1d {
namespace {

// Requantization products acc * m0 stay below 2^62.
constexpr int kProductBits = 63;
constexpr int kActBits = 32;

ShareVec Repeat(const ShareVec& per_row, size_t rows, size_t cols) {
  std::vector<size_t> idx(rows * cols);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) idx[r * cols + c] = r;
  }
  return Gather(per_row, idx);
}

std::vector<std::vector<int64_t>> OpenLayer(Party& p, const ShareVec& act, Shape s,
                                            size_t batch) {
  Vec v = Open(p, act);
  MacCheckFlush(p);
  std::vector<std::vector<int64_t>> out(batch, std::vector<int64_t>(s.size()));
  for (int c = 0; c < s.channels; ++c) {
    for (int j = 0; j < s.length; ++j) {
      for (size_t b = 0; b < batch; ++b) {
        out[b][static_cast<size_t>(c) * s.length + j] = static_cast<int64_t>(
            p.ring().ToSigned(v[(static_cast<size_t>(c) * s.length + j) * batch + b]));
      }
    }
  }
  return out;
}

}  // namespace

Vec EncodeSecretParams(const Ring& r, const QuantizedModel& m) {
  if (!m.has_params) throw UsageError("model parameters are missing");
  Vec v;
  auto put = [&](int64_t x) { v.push_back(r.FromSigned(x)); };
  for (const Layer& l : m.layers) {
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      for (int32_t w : c->weights) put(w - c->weight_qp.zero_point);
      for (int64_t b : c->bias) put(b);
      put(c->rq.m0);
      put(c->rq.shift);
      put(c->out_qp.zero_point);
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      for (int o = 0; o < d->outputs; ++o) {
        for (int i = 0; i < d->inputs; ++i) {
          put(d->weights[static_cast<size_t>(i) * d->outputs + o] - d->weight_qp.zero_point);
        }
      }
      for (int64_t b : d->bias) put(b);
      put(d->rq.m0);
      put(d->rq.shift);
      put(d->out_qp.zero_point);
    } else if (auto* pl = std::get_if<PoolLayer>(&l)) {
      if (pl->divisor == DivisorVisibility::kSecret) put(pl->window);
    }
  }
  return v;
}

SharedModel ShareModel(Party& p, const QuantizedModel& arch, int owner,
                       const QuantizedModel* full) {
  const size_t n = SecretParamCount(arch);
  Vec values;
  if (p.node() == owner) {
    if (!full) throw UsageError("model owner must supply the model");
    values = EncodeSecretParams(p.ring(), *full);
    if (values.size() != n) throw UsageError("model does not match its architecture");
  }
  ShareVec all = InputFrom(p, owner, n, p.node() == owner ? &values : nullptr);
  SharedModel sm;
  sm.arch = arch;
  if (!p.is_compute()) return sm;
  size_t pos = 0;
  auto take = [&](size_t k) {
    ShareVec s = Slice(all, pos, k);
    pos += k;
    return s;
  };
  for (const Layer& l : arch.layers) {
    SharedModel::Params prm;
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      prm.weights = take(static_cast<size_t>(c->filters) * c->depth * c->width);
      prm.bias = take(c->filters);
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      prm.weights = take(static_cast<size_t>(d->inputs) * d->outputs);
      prm.bias = take(d->outputs);
    } else if (auto* pl = std::get_if<PoolLayer>(&l)) {
      if (pl->divisor == DivisorVisibility::kSecret) prm.divisor = take(1);
    }
    if (std::holds_alternative<ConvLayer>(l) || std::holds_alternative<DenseLayer>(l)) {
      prm.m0 = take(1);
      prm.shift = take(1);
      prm.zero = take(1);
    }
    sm.layers.push_back(std::move(prm));
  }
  return sm;
}

ShareVec SecureConvAccumulate(Party& p, const ShareVec& centered, int depth, int length,
                              size_t batch, const ShareVec& weights, int filters,
                              int width, const ShareVec& bias, Padding padding) {
  const int left = padding == Padding::kTrailing ? 0 : (width - 1) / 2;
  // im2col with a trailing zero element standing in for padding.
  ShareVec src = centered;
  Append(src, EmptyShares(centered.scheme, 1));
  const size_t zero_at = centered.size();
  const size_t rows = static_cast<size_t>(depth) * width;
  const size_t cols = static_cast<size_t>(length) * batch;
  std::vector<size_t> idx(rows * cols);
  for (int d = 0; d < depth; ++d) {
    for (int l = 0; l < width; ++l) {
      const size_t row = static_cast<size_t>(d) * width + l;
      for (int j = 0; j < length; ++j) {
        const int pos = j + l - left;
        for (size_t b = 0; b < batch; ++b) {
          idx[row * cols + static_cast<size_t>(j) * batch + b] =
              pos < 0 || pos >= length
                  ? zero_at
                  : (static_cast<size_t>(d) * length + pos) * batch + b;
        }
      }
    }
  }
  ShareVec z = MatMul(p, weights, Gather(src, idx), filters, rows, cols);
  return Add(p.ring(), z, Repeat(bias, filters, cols));
}

ShareVec SecureRequantize(Party& p, const ShareVec& acc, const ShareVec& m0,
                          const ShareVec& shift, const ShareVec& zero, bool relu,
                          TruncMode mode) {
  const Ring& r = p.ring();
  const size_t n = acc.size();
  ShareVec prod = Mul(p, acc, Broadcast(m0, n));
  ShareVec t1 = Trunc(p, prod, 31, kProductBits, mode);
  ShareVec t2 = TruncSecret(p, t1, shift, kActBits, kMaxRequantShift, mode);
  ShareVec z = Broadcast(zero, n);
  ShareVec v = Add(r, t2, z);
  // out = 255 + [v < 255](v - 255) + [v < lo](lo - v), with lo <= 255.
  ShareVec lo = relu ? z : EmptyShares(v.scheme, n);
  ShareVec v_hi = AddPublic(r, p.ctx(), v, r.Neg(255));
  ShareVec tests[] = {v_hi, Sub(r, v, lo)};
  ShareVec bits = Ltz(p, Concat(tests));
  ShareVec diffs[] = {v_hi, Sub(r, lo, v)};
  ShareVec prods = Mul(p, bits, Concat(diffs));
  ShareVec out = Add(r, Slice(prods, 0, n), Slice(prods, n, n));
  return AddPublic(r, p.ctx(), out, 255);
}

ShareVec SecureAvgPool(Party& p, const ShareVec& x, int channels, int length,
                       size_t batch, int window, const ShareVec* divisor) {
  const Ring& r = p.ring();
  const int out_len = length / window;
  const size_t n = static_cast<size_t>(channels) * out_len * batch;
  ShareVec sum = EmptyShares(x.scheme, n);
  for (int c = 0; c < channels; ++c) {
    for (int j = 0; j < out_len; ++j) {
      for (size_t b = 0; b < batch; ++b) {
        const size_t o = (static_cast<size_t>(c) * out_len + j) * batch + b;
        for (int t = 0; t < window; ++t) {
          const size_t i = (static_cast<size_t>(c) * length + j * window + t) * batch + b;
          sum.a[o] = r.Add(sum.a[o], x.a[i]);
          if (sum.has_b()) sum.b[o] = r.Add(sum.b[o], x.b[i]);
        }
      }
    }
  }
  if (window == 1) return sum;
  // Target floor(t / 2P) with t = 2 sum + P; an estimate within one is
  // corrected exactly by the sign of t - 2P q.
  ShareVec t, approx, twice_p_times_q;
  if (divisor) {
    const int f = r.frac_bits();
    ShareVec dv = Broadcast(*divisor, n);
    t = Add(r, Scale(r, sum, 2), dv);
    ShareVec num = Scale(r, t, r.Pow2(f - 1));  // (sum + P/2) in fixed point
    ShareVec q_fp = DivSecret(p, num, dv, f);
    approx = TruncDet(p, q_fp, f, kActBits);
    twice_p_times_q = Scale(r, Mul(p, approx, dv), 2);
  } else {
    t = AddPublic(r, p.ctx(), Scale(r, sum, 2), window);
    approx = MulPublicFrac(p, t, 2 * static_cast<uint64_t>(window), kActBits);
    twice_p_times_q = Scale(r, approx, 2 * static_cast<u128>(window));
  }
  ShareVec rem = Sub(r, t, twice_p_times_q);
  ShareVec twice_p = divisor ? Scale(r, Broadcast(*divisor, n), 2)
                             : PublicFill(r, p.ctx(), n, 2 * static_cast<u128>(window));
  ShareVec tests[] = {rem, Sub(r, rem, twice_p)};
  ShareVec s = Ltz(p, Concat(tests));
  // q = approx - [rem < 0] + 1 - [rem < 2P].
  ShareVec q = Sub(r, approx, Add(r, Slice(s, 0, n), Slice(s, n, n)));
  return AddPublic(r, p.ctx(), q, 1);
}

ShareVec SecureInfer(Party& p, const SharedModel& m, const ShareVec& inputs, size_t batch,
                     const SecureInferOptions& opts, SecureTrace* trace) {
  if (!p.is_compute()) throw UsageError("secure inference runs on compute nodes");
  const Ring& r = p.ring();
  const QuantizedModel& arch = m.arch;
  const size_t len = arch.input_length;
  if (inputs.size() != len * batch) throw UsageError("input batch has the wrong size");
  if (trace) trace->inputs.assign(batch, {});
  // Activations are stored [channel][position][batch].
  std::vector<size_t> idx(len * batch);
  for (size_t j = 0; j < len; ++j) {
    for (size_t b = 0; b < batch; ++b) idx[j * batch + b] = b * len + j;
  }
  ShareVec act = Gather(inputs, idx);
  Shape s{1, static_cast<int>(len)};
  ShareVec zero = Constant(p, 1, arch.input_qp.zero_point);
  ShareVec label;
  for (size_t li = 0; li < arch.layers.size(); ++li) {
    const Layer& l = arch.layers[li];
    const SharedModel::Params& prm = m.layers[li];
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      ShareVec centered = Sub(r, act, Broadcast(zero, act.size()));
      ShareVec acc = SecureConvAccumulate(p, centered, c->depth, s.length, batch,
                                          prm.weights, c->filters, c->width, prm.bias,
                                          c->padding);
      act = SecureRequantize(p, acc, prm.m0, prm.shift, prm.zero, c->relu, opts.trunc);
      s = {c->filters, s.length};
      zero = prm.zero;
    } else if (auto* pl = std::get_if<PoolLayer>(&l)) {
      act = SecureAvgPool(p, act, s.channels, s.length, batch, pl->window,
                          pl->divisor == DivisorVisibility::kSecret ? &prm.divisor : nullptr);
      s = {s.channels, s.length / pl->window};
    } else if (std::holds_alternative<FlattenLayer>(l)) {
      std::vector<size_t> fidx(act.size());
      for (int c = 0; c < s.channels; ++c) {
        for (int j = 0; j < s.length; ++j) {
          for (size_t b = 0; b < batch; ++b) {
            fidx[(static_cast<size_t>(j) * s.channels + c) * batch + b] =
                (static_cast<size_t>(c) * s.length + j) * batch + b;
          }
        }
      }
      act = Gather(act, fidx);
      s = {1, s.size()};
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      ShareVec centered = Sub(r, act, Broadcast(zero, act.size()));
      ShareVec acc = MatMul(p, prm.weights, centered, d->outputs, d->inputs, batch);
      acc = Add(r, acc, Repeat(prm.bias, d->outputs, batch));
      act = SecureRequantize(p, acc, prm.m0, prm.shift, prm.zero, d->relu, opts.trunc);
      s = {1, d->outputs};
      zero = prm.zero;
    } else {
      std::vector<size_t> aidx(act.size());
      for (size_t b = 0; b < batch; ++b) {
        for (int o = 0; o < s.length; ++o) {
          aidx[b * s.length + o] = static_cast<size_t>(o) * batch + b;
        }
      }
      label = Argmax(p, Gather(act, aidx), batch).index;
      if (trace && opts.debug_reveal) {
        auto opened = OpenLayer(p, label, {1, 1}, batch);
        for (size_t b = 0; b < batch; ++b) trace->inputs[b].push_back(opened[b]);
      }
      continue;
    }
    if (trace && opts.debug_reveal) {
      auto opened = OpenLayer(p, act, s, batch);
      for (size_t b = 0; b < batch; ++b) trace->inputs[b].push_back(std::move(opened[b]));
    }
  }
  if (label.size() != batch) throw UsageError("model has no argmax layer");
  return label;
}

}  // namespace obliv1d
