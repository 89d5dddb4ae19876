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

#include "obliv1d/model_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "obliv1d/crypto.h"
#include "obliv1d/errors.h"

namespace obliv1d {
namespace {

constexpr size_t kValuesPerLine = 24;
constexpr size_t kMaxArray = size_t{1} << 26;

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CheckToken(const std::string& s, const char* what) {
  if (s.empty()) throw ValidationError(std::string(what) + " must not be empty");
  for (char c : s) {
    if (c <= ' ' || c == 0x7f) {
      throw ValidationError(std::string(what) + " must not contain whitespace");
    }
  }
}

template <typename T>
void PutArray(std::ostringstream& os, const char* key, const std::vector<T>& v) {
  os << key << ' ' << v.size() << '\n';
  for (size_t i = 0; i < v.size(); ++i) {
    os << v[i] << ((i + 1) % kValuesPerLine == 0 || i + 1 == v.size() ? '\n' : ' ');
  }
}

void PutQuant(std::ostringstream& os, const char* key, const QuantParams& qp) {
  os << key << " scale=" << FormatDouble(qp.scale) << " zero=" << qp.zero_point << '\n';
}

std::string HexDigest(const std::string& body) {
  Digest d = Sha256({reinterpret_cast<const uint8_t*>(body.data()), body.size()});
  return HexEncode(d);
}

std::string ModelBody(const QuantizedModel& m) {
  CheckToken(m.name, "model name");
  CheckToken(m.version, "model version");
  for (const auto& l : m.labels) CheckToken(l, "label");
  std::ostringstream os;
  os << kModelMagic << ' ' << kFormatVersion << '\n';
  os << "name " << m.name << '\n';
  os << "version " << m.version << '\n';
  os << "input length=" << m.input_length << " scale=" << FormatDouble(m.input_qp.scale)
     << " zero=" << m.input_qp.zero_point << '\n';
  os << "labels " << m.labels.size();
  for (const auto& l : m.labels) os << ' ' << l;
  os << '\n';
  os << "params " << (m.has_params ? "present" : "omitted") << '\n';
  for (const Layer& l : m.layers) {
    if (auto* c = std::get_if<ConvLayer>(&l)) {
      os << "layer conv filters=" << c->filters << " width=" << c->width
         << " depth=" << c->depth << " padding=" << PaddingName(c->padding)
         << " relu=" << (c->relu ? 1 : 0) << '\n';
      if (m.has_params) {
        PutQuant(os, "weight_qp", c->weight_qp);
        PutQuant(os, "out_qp", c->out_qp);
        os << "requant m0=" << c->rq.m0 << " shift=" << c->rq.shift << '\n';
        PutArray(os, "weights", c->weights);
        PutArray(os, "bias", c->bias);
      }
    } else if (auto* p = std::get_if<PoolLayer>(&l)) {
      os << "layer pool window=" << p->window << " divisor=" << DivisorName(p->divisor)
         << '\n';
    } else if (std::holds_alternative<FlattenLayer>(l)) {
      os << "layer flatten\n";
    } else if (auto* d = std::get_if<DenseLayer>(&l)) {
      os << "layer dense inputs=" << d->inputs << " outputs=" << d->outputs
         << " relu=" << (d->relu ? 1 : 0) << '\n';
      if (m.has_params) {
        PutQuant(os, "weight_qp", d->weight_qp);
        PutQuant(os, "out_qp", d->out_qp);
        os << "requant m0=" << d->rq.m0 << " shift=" << d->rq.shift << '\n';
        PutArray(os, "weights", d->weights);
        PutArray(os, "bias", d->bias);
      }
    } else {
      os << "layer argmax\n";
    }
  }
  return os.str();
}

// Line-oriented reader with positional diagnostics.
class Reader {
 public:
  explicit Reader(const std::string& text) {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines_.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) lines_.push_back(cur);
  }

  bool done() const { return pos_ >= lines_.size(); }
  size_t line_no() const { return pos_; }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ValidationError("line " + std::to_string(std::min(pos_, lines_.size())) + ": " +
                          what);
  }

  // Next line split on single spaces; the first token must be `key`.
  std::vector<std::string> Expect(const std::string& key) {
    if (done()) Fail("unexpected end of file, expected '" + key + "'");
    auto toks = Split(lines_[pos_++]);
    if (toks.empty() || toks[0] != key) {
      Fail("expected '" + key + "', found '" + (toks.empty() ? "" : toks[0]) + "'");
    }
    return toks;
  }

  std::vector<std::string> Peek() const {
    return done() ? std::vector<std::string>{} : Split(lines_[pos_]);
  }

  // key=value fields after the first token(s).
  std::map<std::string, std::string> Fields(const std::vector<std::string>& toks,
                                            size_t from) {
    std::map<std::string, std::string> f;
    for (size_t i = from; i < toks.size(); ++i) {
      auto eq = toks[i].find('=');
      if (eq == std::string::npos || eq == 0) Fail("malformed field '" + toks[i] + "'");
      if (!f.emplace(toks[i].substr(0, eq), toks[i].substr(eq + 1)).second) {
        Fail("duplicate field '" + toks[i].substr(0, eq) + "'");
      }
    }
    return f;
  }

  int64_t Int(const std::map<std::string, std::string>& f, const std::string& key,
              int64_t lo, int64_t hi) {
    auto it = f.find(key);
    if (it == f.end()) Fail("missing field '" + key + "'");
    return ParseInt(it->second, key, lo, hi);
  }

  double Real(const std::map<std::string, std::string>& f, const std::string& key) {
    auto it = f.find(key);
    if (it == f.end()) Fail("missing field '" + key + "'");
    double v = 0;
    const std::string& s = it->second;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      Fail("field '" + key + "' is not a finite number");
    }
    return v;
  }

  std::string Str(const std::map<std::string, std::string>& f, const std::string& key) {
    auto it = f.find(key);
    if (it == f.end()) Fail("missing field '" + key + "'");
    return it->second;
  }

  int64_t ParseInt(const std::string& s, const std::string& what, int64_t lo, int64_t hi) {
    int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      Fail(what + " '" + s + "' is not an integer");
    }
    if (v < lo || v > hi) {
      Fail(what + " = " + s + " outside [" + std::to_string(lo) + ", " +
           std::to_string(hi) + "]");
    }
    return v;
  }

  // "key N" followed by N integers over as many lines as needed.
  std::vector<int64_t> Array(const std::string& key, int64_t lo, int64_t hi) {
    auto head = Expect(key);
    if (head.size() != 2) Fail("'" + key + "' needs a count");
    const size_t n = static_cast<size_t>(ParseInt(head[1], key + " count", 0, kMaxArray));
    std::vector<int64_t> v;
    v.reserve(n);
    while (v.size() < n) {
      if (done()) Fail("'" + key + "' ends after " + std::to_string(v.size()) + " values");
      auto toks = Split(lines_[pos_++]);
      if (toks.empty()) Fail("empty line inside '" + key + "'");
      for (const auto& t : toks) {
        if (v.size() == n) Fail("'" + key + "' has more than " + std::to_string(n) + " values");
        v.push_back(ParseInt(t, key + "[" + std::to_string(v.size()) + "]", lo, hi));
      }
    }
    return v;
  }

  void ExpectEnd() {
    if (!done()) Fail("trailing content");
  }

 private:
  static std::vector<std::string> Split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
      if (c == ' ') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
  }

  std::vector<std::string> lines_;
  size_t pos_ = 0;
};

void CheckMagic(Reader& rd, const char* magic) {
  auto t = rd.Expect(magic);
  if (t.size() != 2) rd.Fail("malformed header");
  const int64_t v = rd.ParseInt(t[1], "format version", 0, 1000);
  if (v != kFormatVersion) rd.Fail("unsupported format version " + t[1]);
}

// Splits "<body>checksum sha256:<hex>\n" and verifies the digest.
std::string VerifiedBody(const std::string& text, const char* kind) {
  const std::string tag = "checksum sha256:";
  const size_t at = text.rfind(tag);
  if (at == std::string::npos || (at > 0 && text[at - 1] != '\n')) {
    throw ValidationError(std::string(kind) + ": missing checksum line");
  }
  std::string hex = text.substr(at + tag.size());
  if (!hex.empty() && hex.back() == '\n') hex.pop_back();
  const std::string body = text.substr(0, at);
  if (hex != HexDigest(body)) {
    throw ValidationError(std::string(kind) + ": checksum mismatch");
  }
  return body;
}

QuantParams ReadQuant(Reader& rd, const char* key, int lo, int hi) {
  auto t = rd.Expect(key);
  auto f = rd.Fields(t, 1);
  QuantParams qp;
  qp.scale = rd.Real(f, "scale");
  qp.zero_point = static_cast<int32_t>(rd.Int(f, "zero", lo, hi));
  if (!(qp.scale > 0)) rd.Fail(std::string(key) + " scale must be positive");
  return qp;
}

Requant ReadRequant(Reader& rd) {
  auto t = rd.Expect("requant");
  auto f = rd.Fields(t, 1);
  return {rd.Int(f, "m0", int64_t{1} << 30, (int64_t{1} << 31) - 1),
          static_cast<int32_t>(rd.Int(f, "shift", 0, kMaxRequantShift))};
}

std::vector<int32_t> ToI32(const std::vector<int64_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

std::string SerializeModel(const QuantizedModel& m) {
  ValidateModel(m);
  std::string body = ModelBody(m);
  return body + "checksum sha256:" + HexDigest(body) + "\n";
}

std::string ModelChecksum(const QuantizedModel& m) { return HexDigest(ModelBody(m)); }

QuantizedModel ParseModel(const std::string& text) {
  const std::string body = VerifiedBody(text, "model");
  Reader rd(body);
  CheckMagic(rd, kModelMagic);
  QuantizedModel m;
  auto name = rd.Expect("name");
  if (name.size() != 2) rd.Fail("name must be one token");
  m.name = name[1];
  auto ver = rd.Expect("version");
  if (ver.size() != 2) rd.Fail("version must be one token");
  m.version = ver[1];
  auto in = rd.Fields(rd.Expect("input"), 1);
  m.input_length = static_cast<int>(rd.Int(in, "length", 1, 1 << 20));
  m.input_qp.scale = rd.Real(in, "scale");
  m.input_qp.zero_point = static_cast<int32_t>(rd.Int(in, "zero", 0, 255));
  auto labels = rd.Expect("labels");
  if (labels.size() < 2) rd.Fail("labels needs a count");
  const int64_t nl = rd.ParseInt(labels[1], "label count", 0, 1 << 16);
  if (static_cast<size_t>(nl) + 2 != labels.size()) rd.Fail("label count mismatch");
  m.labels.assign(labels.begin() + 2, labels.end());
  auto params = rd.Expect("params");
  if (params.size() != 2 || (params[1] != "present" && params[1] != "omitted")) {
    rd.Fail("params must be 'present' or 'omitted'");
  }
  m.has_params = params[1] == "present";
  while (!rd.done()) {
    auto t = rd.Expect("layer");
    if (t.size() < 2) rd.Fail("layer needs a kind");
    const std::string kind = t[1];
    auto f = rd.Fields(t, 2);
    if (kind == "conv") {
      ConvLayer c;
      c.filters = static_cast<int>(rd.Int(f, "filters", 1, 1 << 16));
      c.width = static_cast<int>(rd.Int(f, "width", 1, 1 << 10));
      c.depth = static_cast<int>(rd.Int(f, "depth", 1, 1 << 16));
      const std::string pad = rd.Str(f, "padding");
      if (pad == "same_centered") {
        c.padding = Padding::kSameCentered;
      } else if (pad == "trailing") {
        c.padding = Padding::kTrailing;
      } else {
        rd.Fail("unknown padding '" + pad + "'");
      }
      c.relu = rd.Int(f, "relu", 0, 1) == 1;
      if (m.has_params) {
        c.weight_qp = ReadQuant(rd, "weight_qp", -128, 127);
        c.out_qp = ReadQuant(rd, "out_qp", 0, 255);
        c.rq = ReadRequant(rd);
        c.weights = ToI32(rd.Array("weights", INT32_MIN, INT32_MAX));
        c.bias = rd.Array("bias", INT32_MIN, INT32_MAX);
      }
      m.layers.push_back(c);
    } else if (kind == "pool") {
      PoolLayer p;
      p.window = static_cast<int>(rd.Int(f, "window", 1, 1 << 20));
      const std::string dv = rd.Str(f, "divisor");
      if (dv == "public") {
        p.divisor = DivisorVisibility::kPublic;
      } else if (dv == "secret") {
        p.divisor = DivisorVisibility::kSecret;
      } else {
        rd.Fail("unknown divisor visibility '" + dv + "'");
      }
      m.layers.push_back(p);
    } else if (kind == "flatten") {
      m.layers.push_back(FlattenLayer{});
    } else if (kind == "dense") {
      DenseLayer d;
      d.inputs = static_cast<int>(rd.Int(f, "inputs", 1, 1 << 24));
      d.outputs = static_cast<int>(rd.Int(f, "outputs", 1, 1 << 16));
      d.relu = rd.Int(f, "relu", 0, 1) == 1;
      if (m.has_params) {
        d.weight_qp = ReadQuant(rd, "weight_qp", -128, 127);
        d.out_qp = ReadQuant(rd, "out_qp", 0, 255);
        d.rq = ReadRequant(rd);
        d.weights = ToI32(rd.Array("weights", INT32_MIN, INT32_MAX));
        d.bias = rd.Array("bias", INT32_MIN, INT32_MAX);
      }
      m.layers.push_back(d);
    } else if (kind == "argmax") {
      m.layers.push_back(ArgmaxLayer{});
    } else {
      rd.Fail("unknown layer kind '" + kind + "'");
    }
    if (kind != "conv" && kind != "pool" && kind != "dense" && f.size() > 0 &&
        kind != "argmax") {
      rd.Fail("unexpected fields on " + kind);
    }
  }
  ValidateModel(m);
  return m;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteFile(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path);
  out << data;
  if (!out) throw ValidationError("write failed for " + path);
}

void WriteModel(const std::string& path, const QuantizedModel& m) {
  WriteFile(path, SerializeModel(m));
}

QuantizedModel LoadModel(const std::string& path) {
  try {
    return ParseModel(ReadFile(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// --- Input vectors -----------------------------------------------------------

std::string SerializeInput(const InputVector& v) {
  std::ostringstream os;
  os << kVectorMagic << ' ' << kFormatVersion << '\n';
  if (!v.model_checksum.empty()) os << "model sha256:" << v.model_checksum << '\n';
  PutArray(os, "values", v.values);
  return os.str();
}

InputVector ParseInput(const std::string& text) {
  Reader rd(text);
  CheckMagic(rd, kVectorMagic);
  InputVector v;
  auto next = rd.Peek();
  if (!next.empty() && next[0] == "model") {
    auto t = rd.Expect("model");
    if (t.size() != 2 || t[1].rfind("sha256:", 0) != 0) rd.Fail("malformed model binding");
    v.model_checksum = t[1].substr(7);
  }
  v.values = rd.Array("values", 0, 255);
  rd.ExpectEnd();
  return v;
}

void WriteInput(const std::string& path, const InputVector& v) {
  WriteFile(path, SerializeInput(v));
}

InputVector LoadInput(const std::string& path, const QuantizedModel* model) {
  InputVector v;
  try {
    v = ParseInput(ReadFile(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (model) {
    if (static_cast<int>(v.values.size()) != model->input_length) {
      throw ValidationError(path + ": input has " + std::to_string(v.values.size()) +
                            " values, model expects " +
                            std::to_string(model->input_length));
    }
    if (!v.model_checksum.empty() && model->has_params &&
        v.model_checksum != ModelChecksum(*model)) {
      throw ValidationError(path + ": input is bound to a different model");
    }
  }
  return v;
}

// --- Test vectors ------------------------------------------------------------

std::string SerializeTestVectors(const TestVectors& t) {
  std::ostringstream os;
  os << kTestMagic << ' ' << kFormatVersion << '\n';
  os << "model sha256:" << t.model_checksum << '\n';
  os << "cases " << t.cases.size() << '\n';
  for (const TestCase& c : t.cases) {
    os << "case label=" << c.label << " layers=" << c.layers.size() << '\n';
    PutArray(os, "input", c.input);
    for (const auto& l : c.layers) PutArray(os, "layer", l);
  }
  return os.str();
}

TestVectors ParseTestVectors(const std::string& text) {
  Reader rd(text);
  CheckMagic(rd, kTestMagic);
  TestVectors t;
  auto mb = rd.Expect("model");
  if (mb.size() != 2 || mb[1].rfind("sha256:", 0) != 0) rd.Fail("malformed model binding");
  t.model_checksum = mb[1].substr(7);
  auto ct = rd.Expect("cases");
  if (ct.size() != 2) rd.Fail("cases needs a count");
  const int64_t n = rd.ParseInt(ct[1], "case count", 0, 1 << 24);
  for (int64_t i = 0; i < n; ++i) {
    auto f = rd.Fields(rd.Expect("case"), 1);
    TestCase c;
    c.label = static_cast<int>(rd.Int(f, "label", 0, 1 << 16));
    const int64_t nl = rd.Int(f, "layers", 0, 1 << 10);
    c.input = rd.Array("input", 0, 255);
    for (int64_t l = 0; l < nl; ++l) c.layers.push_back(rd.Array("layer", INT64_MIN, INT64_MAX));
    t.cases.push_back(std::move(c));
  }
  rd.ExpectEnd();
  return t;
}

void WriteTestVectors(const std::string& path, const TestVectors& t) {
  WriteFile(path, SerializeTestVectors(t));
}

TestVectors LoadTestVectors(const std::string& path, const QuantizedModel& model) {
  TestVectors t;
  try {
    t = ParseTestVectors(ReadFile(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (t.model_checksum != ModelChecksum(model)) {
    throw ValidationError(path + ": test vectors are bound to a different model");
  }
  for (const TestCase& c : t.cases) {
    if (static_cast<int>(c.input.size()) != model.input_length) {
      throw ValidationError(path + ": test input length differs from the model");
    }
  }
  return t;
}

// --- Random models -----------------------------------------------------------

namespace {

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

int ParsePositive(const std::string& s, const std::string& item) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1) {
    throw ValidationError("shape item '" + item + "': '" + s + "' is not a positive integer");
  }
  return v;
}

double LogUniform(std::mt19937_64& rng, double lo_exp, double hi_exp) {
  std::uniform_real_distribution<double> u(lo_exp, hi_exp);
  return std::exp2(u(rng));
}

// Fills weights and picks a multiplier that keeps typical outputs inside
// the uint8 range.
template <typename L>
void RandomParams(L& layer, std::mt19937_64& rng, int fan_in, int units, double in_scale,
                  bool relu) {
  std::uniform_int_distribution<int> wdist(-128, 127);
  std::uniform_int_distribution<int> wz(-4, 4);
  layer.weight_qp = {LogUniform(rng, -8, 0), wz(rng)};
  layer.weights.resize(static_cast<size_t>(fan_in) * units);
  for (auto& w : layer.weights) w = wdist(rng);
  const double acc_std = std::sqrt(static_cast<double>(fan_in)) * 74.0 * 74.0;
  const int64_t bias_range = static_cast<int64_t>(acc_std / 8);
  std::uniform_int_distribution<int64_t> bdist(-bias_range, bias_range);
  layer.bias.resize(units);
  for (auto& b : layer.bias) b = bdist(rng);
  double mult = 64.0 / acc_std * LogUniform(rng, -1, 1);
  mult = std::clamp(mult, std::ldexp(1.0, -40), 0.999);
  layer.rq = RequantFromMultiplier(mult);
  std::uniform_int_distribution<int> zr(0, 48), zf(96, 160);
  layer.out_qp = {in_scale * layer.weight_qp.scale / RequantMultiplier(layer.rq),
                  relu ? zr(rng) : zf(rng)};
  layer.relu = relu;
}

}  // namespace

QuantizedModel GenRandomModel(const std::string& shape, uint64_t seed, int input_length) {
  if (input_length < 1) throw ValidationError("input length must be positive");
  std::mt19937_64 rng(seed);
  QuantizedModel m;
  m.name = "random";
  m.version = std::to_string(seed);
  m.input_length = input_length;
  std::uniform_int_distribution<int> zin(0, 255);
  m.input_qp = {LogUniform(rng, -8, 0), zin(rng)};
  Shape s{1, input_length};
  double scale = m.input_qp.scale;
  auto items = SplitOn(shape, ',');
  // Index of the last dense layer, which gets no RELU.
  int last_dense = -1;
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].rfind("dense:", 0) == 0) last_dense = static_cast<int>(i);
  }
  for (size_t i = 0; i < items.size(); ++i) {
    const std::string& item = items[i];
    auto parts = SplitOn(item, ':');
    if (parts[0] == "conv" && (parts.size() == 2 || parts.size() == 3)) {
      auto fl = SplitOn(parts[1], 'x');
      if (fl.size() != 2) throw ValidationError("shape item '" + item + "': expected FxL");
      ConvLayer c;
      c.filters = ParsePositive(fl[0], item);
      c.width = ParsePositive(fl[1], item);
      c.depth = s.channels;
      if (parts.size() == 3) {
        if (parts[2] != "trailing") {
          throw ValidationError("shape item '" + item + "': unknown option");
        }
        c.padding = Padding::kTrailing;
      }
      RandomParams(c, rng, c.depth * c.width, c.filters, scale, true);
      scale = c.out_qp.scale;
      s = {c.filters, s.length};
      m.layers.push_back(c);
    } else if (parts[0] == "pool" && (parts.size() == 2 || parts.size() == 3)) {
      PoolLayer p;
      p.window = ParsePositive(parts[1], item);
      if (parts.size() == 3) {
        if (parts[2] != "secret") {
          throw ValidationError("shape item '" + item + "': unknown option");
        }
        p.divisor = DivisorVisibility::kSecret;
      }
      if (p.window > s.length) {
        throw ValidationError("shape item '" + item + "': window exceeds width " +
                              std::to_string(s.length));
      }
      s = {s.channels, s.length / p.window};
      m.layers.push_back(p);
    } else if (parts[0] == "flatten" && parts.size() == 1) {
      s = {1, s.size()};
      m.layers.push_back(FlattenLayer{});
    } else if (parts[0] == "dense" && parts.size() == 2) {
      if (s.channels > 1) {
        s = {1, s.size()};
        m.layers.push_back(FlattenLayer{});
      }
      DenseLayer d;
      d.inputs = s.length;
      d.outputs = ParsePositive(parts[1], item);
      RandomParams(d, rng, d.inputs, d.outputs, scale, static_cast<int>(i) != last_dense);
      // Dense weights are stored inputs x outputs; RandomParams filled the
      // same count, so only the bound check depends on the layout.
      scale = d.out_qp.scale;
      s = {1, d.outputs};
      m.layers.push_back(d);
    } else {
      throw ValidationError("shape item '" + item + "' not understood");
    }
    const int64_t bound = AccumulatorBound(m.layers.back());
    if (bound >= (int64_t{1} << 31)) {
      throw ValidationError("shape item '" + item + "': accumulator bound " +
                            std::to_string(bound) + " reaches 2^31");
    }
  }
  if (s.channels > 1) m.layers.push_back(FlattenLayer{});
  m.layers.push_back(ArgmaxLayer{});
  ValidateModel(m);
  return m;
}

std::vector<std::vector<int64_t>> GenRandomInputs(const QuantizedModel& m, size_t count,
                                                  uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  std::vector<std::vector<int64_t>> out(count, std::vector<int64_t>(m.input_length));
  for (auto& v : out) {
    for (auto& x : v) x = u(rng);
  }
  return out;
}

TestVectors MakeTestVectors(const QuantizedModel& m,
                            const std::vector<std::vector<int64_t>>& inputs) {
  TestVectors t;
  t.model_checksum = ModelChecksum(m);
  for (const auto& in : inputs) {
    PlainTrace tr = InferPlain(m, in);
    t.cases.push_back({in, tr.label, tr.layers});
  }
  return t;
}

}  // namespace obliv1d
