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


#include "obliv1d/cli.h"

#include <sodium.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <mutex>

#include "obliv1d/engine.h"
#include "obliv1d/errors.h"
#include "obliv1d/model_io.h"

namespace obliv1d {
namespace {

using json = nlohmann::json;

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// One logfmt line per event on the error stream, filtered by OBLIV1D_LOG.
class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {
    const char* env = std::getenv("OBLIV1D_LOG");
    const std::string v = env ? env : "warn";
    if (v == "error") level_ = LogLevel::kError;
    if (v == "info") level_ = LogLevel::kInfo;
    if (v == "debug") level_ = LogLevel::kDebug;
  }

  void Event(LogLevel level, const std::string& event,
             const std::vector<std::pair<std::string, std::string>>& fields = {}) {
    if (level > level_) return;
    static const char* kNames[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mu_);
    err_ << "level=" << kNames[static_cast<int>(level)] << " event=" << event;
    for (const auto& [k, v] : fields) err_ << ' ' << k << '=' << Quote(v);
    err_ << '\n';
  }

 private:
  static std::string Quote(const std::string& v) {
    if (!v.empty() && v.find_first_of(" \"=") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c == '\n' ? ' ' : c);
    }
    return q + "\"";
  }

  std::ostream& err_;
  LogLevel level_ = LogLevel::kWarn;
  std::mutex mu_;
};

// OBLIV1D_SEED as a decimal integer or 64 hex digits.
bool SeedFromEnv(Key* key) {
  const char* env = std::getenv("OBLIV1D_SEED");
  if (!env || !*env) return false;
  const std::string s = env;
  std::vector<uint8_t> bytes;
  if (s.size() == 64 && HexDecode(s, bytes)) {
    std::copy(bytes.begin(), bytes.end(), key->begin());
    return true;
  }
  try {
    size_t used = 0;
    const uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw UsageError("");
    *key = KeyFromSeed(v);
  } catch (const std::exception&) {
    throw UsageError("OBLIV1D_SEED must be an integer or 64 hex digits");
  }
  return true;
}

// --seed wins, then OBLIV1D_SEED, then fresh OS randomness (if allowed).
Key ResolveSeed(const std::optional<uint64_t>& flag, bool random_ok) {
  if (flag) return KeyFromSeed(*flag);
  Key k{};
  if (SeedFromEnv(&k)) return k;
  if (!random_ok) return KeyFromSeed(0);
  randombytes_buf(k.data(), k.size());
  return k;
}

TruncMode ParseTrunc(const std::string& s) {
  if (s == "det") return TruncMode::kDeterministic;
  if (s == "prob") return TruncMode::kProbabilistic;
  throw UsageError("--trunc must be det or prob");
}

MacCheckMode ParseMacCheck(const std::string& s) {
  if (s == "batched") return MacCheckMode::kBatched;
  if (s == "every-open") return MacCheckMode::kEveryOpen;
  throw UsageError("--mac-check must be batched or every-open");
}

std::string LabelName(const QuantizedModel& m, int label) {
  if (label >= 0 && label < static_cast<int>(m.labels.size())) return m.labels[label];
  return std::to_string(label);
}

std::vector<std::vector<int64_t>> LoadInputs(const std::vector<std::string>& paths,
                                             const QuantizedModel& m) {
  std::vector<std::vector<int64_t>> out;
  for (const auto& p : paths) out.push_back(LoadInput(p, &m).values);
  return out;
}

json ConsumptionJson(const Consumption& c) {
  json j = json::object();
  for (const auto& [k, v] : c) j[k] = v;
  return j;
}

json CountsJson(const PreprocCounts& c) {
  json masks = json::object();
  for (const auto& [owner, n] : c.masks) masks[std::to_string(owner)] = n;
  return {{"triples", c.triples}, {"bits", c.bits}, {"masks", masks}};
}

// Shared scheme flags.
struct SchemeFlags {
  std::string scheme = "semi-2pc";
  std::string ring = "prime64";
  std::string trunc = "det";
  std::string mac_check = "batched";
  std::string reveal = "alice";

  void Add(CLI::App* app) {
    app->add_option("--scheme", scheme, "semi-2pc|active-2pc|semi-3pc|active-3pc");
    app->add_option("--ring", ring, "prime64|mod2k");
    app->add_option("--trunc", trunc, "det|prob");
    app->add_option("--mac-check", mac_check, "batched|every-open");
    app->add_option("--reveal-to", reveal, "alice|bob|third-party:<addr>");
  }

  struct Resolved {
    SchemeCode code;
    Ring ring = Ring::Prime64();
    TruncMode trunc;
    MacCheckMode mac;
    RevealPolicy reveal;
  };

  Resolved Resolve() const {
    Resolved r{ParseSchemeCode(scheme), ParseRing(ring), ParseTrunc(trunc),
               ParseMacCheck(mac_check), ParseRevealPolicy(reveal)};
    CheckSupported(r.code, r.ring);
    return r;
  }
};

int ExitCodeFor(ErrorKind k) {
  switch (k) {
    case ErrorKind::kNone:
      return kExitOk;
    case ErrorKind::kUsage:
      return kExitUsage;
    case ErrorKind::kAbort:
      return kExitAbort;
    default:
      return kExitOperational;
  }
}

// --- Subcommands ---------------------------------------------------------------

struct OracleCmd {
  std::string model = DefaultModelPath();
  std::vector<std::string> inputs;
  bool trace = false;

  int Run(std::ostream& out) {
    const QuantizedModel m = LoadModel(model);
    if (inputs.empty()) throw UsageError("oracle needs --input");
    for (const auto& in : LoadInputs(inputs, m)) {
      const PlainTrace tr = InferPlain(m, in);
      if (trace) {
        for (size_t l = 0; l < tr.layers.size(); ++l) {
          out << "layer " << l << ' ' << LayerKindName(m.layers[l]);
          for (int64_t v : tr.layers[l]) out << ' ' << v;
          out << '\n';
        }
      }
      out << tr.label << '\n';
    }
    return kExitOk;
  }
};

struct LocalSimCmd {
  SchemeFlags flags;
  std::string model = DefaultModelPath();
  std::vector<std::string> inputs;
  std::optional<uint64_t> seed;
  std::string preproc_dir;

  int Run(std::ostream& out, Log& log) {
    const auto s = flags.Resolve();
    const QuantizedModel m = LoadModel(model);
    const Key key = ResolveSeed(seed, false);
    std::vector<std::vector<int64_t>> ins =
        inputs.empty() ? GenRandomInputs(m, 1, seed.value_or(0)) : LoadInputs(inputs, m);
    SimOptions opts;
    opts.seed = key;
    opts.party.mac_check = s.mac;
    std::vector<std::string> paths;
    if (!preproc_dir.empty()) {
      const PreprocCounts counts = MeasurePreprocessing(s.ring, s.code, Architecture(m),
                                                        ins.size(), s.trunc, s.reveal);
      paths = WritePreprocFiles(preproc_dir, s.ring, s.code, key, counts);
      opts.source = [&](int node) { return std::make_unique<FileSource>(paths.at(node)); };
    }
    log.Event(LogLevel::kInfo, "local_sim_start",
              {{"scheme", flags.scheme}, {"ring", flags.ring}, {"trunc", flags.trunc},
               {"batch", std::to_string(ins.size())}});
    LocalInferenceOutput res =
        RunLocalInference(s.ring, s.code, opts, m, ins, s.trunc, s.reveal);
    std::vector<uint8_t> chain;
    uint64_t rounds = 0, bytes = 0;
    for (const NodeResult& n : res.nodes) {
      chain.insert(chain.end(), n.transcript.begin(), n.transcript.end());
      rounds = std::max(rounds, n.rounds);
      bytes += n.bytes_sent;
    }
    bool all_match = true;
    for (size_t i = 0; i < ins.size(); ++i) {
      const int oracle = InferPlain(m, ins[i]).label;
      all_match &= oracle == res.labels.at(i);
      out << "class " << res.labels[i] << ' ' << LabelName(m, res.labels[i]) << " oracle "
          << oracle << '\n';
    }
    out << "transcript sha256:" << HexEncode(Sha256(chain)) << '\n';
    log.Event(LogLevel::kInfo, "local_sim_done",
              {{"rounds", std::to_string(rounds)}, {"bytes", std::to_string(bytes)},
               {"oracle_match", all_match ? "yes" : "no"}});
    return kExitOk;
  }
};

struct DealerCmd {
  SchemeFlags flags;
  std::string model = DefaultModelPath();
  size_t batch = 1;
  std::string out_dir;
  std::optional<uint64_t> seed;

  int Run(std::ostream& out, Log& log) {
    const auto s = flags.Resolve();
    const QuantizedModel arch = Architecture(LoadModel(model));
    const PreprocCounts counts =
        MeasurePreprocessing(s.ring, s.code, arch, batch, s.trunc, s.reveal);
    const auto paths = WritePreprocFiles(out_dir, s.ring, s.code, ResolveSeed(seed, true),
                                         counts);
    json j = {{"scheme", flags.scheme}, {"ring", flags.ring}, {"batch", batch},
              {"counts", CountsJson(counts)}, {"files", paths}};
    out << j.dump() << '\n';
    log.Event(LogLevel::kInfo, "dealer_done", {{"files", std::to_string(paths.size())}});
    return kExitOk;
  }
};

struct PartyCmd {
  SchemeFlags flags;
  std::string role;
  std::string model;
  std::vector<std::string> inputs;
  std::string peers;
  std::string preproc;
  uint64_t session = 1;
  int timeout_s = 30;

  int Run(std::ostream& out, Log& log) {
    const auto s = flags.Resolve();
    const SchemeInfo info = Describe(s.code);
    const int self = ParseRoleNode(s.code, role);
    if (self == info.bob() && model.empty()) throw UsageError("--role bob needs --model");
    if (self != info.bob() && !model.empty()) {
      throw UsageError("--model is only for --role bob");
    }
    if (self == info.alice() && inputs.empty()) throw UsageError("--role alice needs --input");
    if (self != info.alice() && !inputs.empty()) {
      throw UsageError("--input is only for --role alice");
    }
    if (preproc.empty()) throw UsageError("party needs --preproc");
    const int target = RevealNode(s.code, s.reveal);
    if (self == info.third_party() && target != self) {
      throw UsageError("the third party takes part only with --reveal-to third-party:<addr>");
    }

    std::map<int, Endpoint> endpoints;
    std::stringstream ss(peers);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const size_t eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--peers entries are role=host:port");
      const int node = ParseRoleNode(s.code, item.substr(0, eq));
      endpoints[node] = ParseEndpoint(item.substr(eq + 1));
    }
    if (s.reveal.kind == RevealKind::kThirdParty) {
      const Endpoint tp = ParseEndpoint(s.reveal.address);
      auto it = endpoints.find(info.third_party());
      if (it != endpoints.end() && (it->second.host != tp.host || it->second.port != tp.port)) {
        throw UsageError("--peers and --reveal-to disagree on the third party's address");
      }
      endpoints[info.third_party()] = tp;
    }
    std::vector<int> nodes;
    for (int n : SessionNodes(s.code, self)) {
      if (n == info.third_party() && target != n) continue;
      if (!endpoints.count(n)) {
        throw UsageError("--peers lacks an address for " + NodeName(s.code, n));
      }
      nodes.push_back(n);
    }

    FileSource pre(preproc);
    if (pre.scheme() != s.code || pre.node() != self || !(pre.ring() == s.ring)) {
      throw UsageError("--preproc file belongs to a different scheme, ring or role");
    }
    QuantizedModel full;
    std::vector<std::vector<int64_t>> ins;
    if (self == info.bob()) full = LoadModel(model);
    if (self == info.alice()) {
      for (const auto& p : inputs) ins.push_back(LoadInput(p, nullptr).values);
    }

    log.Event(LogLevel::kInfo, "party_connect",
              {{"role", role}, {"node", std::to_string(self)},
               {"session", std::to_string(session)}});
    SessionInfo si{session, static_cast<uint8_t>(s.code), s.ring, self, nodes};
    auto net = ConnectTcp(si, endpoints, std::chrono::seconds(timeout_s));
    PartyOptions po;
    po.mac_check = s.mac;
    Party party(*net, pre, s.code, ResolveSeed(std::nullopt, true), po);
    InferenceRequest req;
    req.trunc = s.trunc;
    req.reveal = s.reveal;
    if (self == info.bob()) req.model = &full;
    if (self == info.alice()) req.inputs = &ins;
    InferenceResult res = RunInference(party, req);
    for (int label : res.labels) out << label << ' ' << LabelName(res.arch, label) << '\n';
    log.Event(LogLevel::kInfo, "party_done",
              {{"rounds", std::to_string(net->rounds())},
               {"bytes", std::to_string(net->total_bytes_sent())}});
    net->Close();
    return kExitOk;
  }
};

struct BenchCmd {
  SchemeFlags flags;
  std::string model;
  std::string shape = "conv:128x5,pool:4,conv:128x5,flatten,dense:8";
  std::string pool = "public";
  int repeat = 3;
  size_t batch = 1;
  std::optional<uint64_t> seed;

  int Run(std::ostream& out, Log& log) {
    const auto s = flags.Resolve();
    if (repeat < 1) throw UsageError("--repeat must be at least 1");
    QuantizedModel m;
    if (!model.empty()) {
      m = LoadModel(model);
    } else {
      if (pool != "public" && pool != "secret") throw UsageError("--pool must be public|secret");
      std::string sh = shape;
      if (pool == "secret") {
        for (size_t at = sh.find("pool:"); at != std::string::npos;
             at = sh.find("pool:", at + 1)) {
          size_t end = sh.find(',', at);
          if (end == std::string::npos) end = sh.size();
          if (sh.substr(at, end - at).find(":secret") == std::string::npos) {
            sh.insert(end, ":secret");
          }
        }
      }
      m = GenRandomModel(sh, seed.value_or(1), 40);
    }
    const auto ins = GenRandomInputs(m, batch, seed.value_or(1));
    const Key key = ResolveSeed(seed, false);
    json first;
    bool stable = true;
    for (int r = 0; r < repeat; ++r) {
      SimOptions opts;
      opts.seed = key;
      opts.party.mac_check = s.mac;
      const auto t0 = std::chrono::steady_clock::now();
      LocalInferenceOutput res =
          RunLocalInference(s.ring, s.code, opts, m, ins, s.trunc, s.reveal);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
      uint64_t rounds = 0, bytes = 0;
      for (const NodeResult& n : res.nodes) {
        rounds = std::max(rounds, n.rounds);
        bytes += n.bytes_sent;
      }
      json j = {{"repeat", r},
                {"scheme", flags.scheme},
                {"ring", flags.ring},
                {"trunc", flags.trunc},
                {"batch", batch},
                {"wall_ms", ms},
                {"rounds", rounds},
                {"bytes", bytes},
                {"preprocessing", ConsumptionJson(res.nodes.at(0).consumed)}};
      out << j.dump() << '\n';
      if (r == 0) {
        first = j;
      } else if (j["rounds"] != first["rounds"] || j["bytes"] != first["bytes"] ||
                 j["preprocessing"] != first["preprocessing"]) {
        stable = false;
      }
    }
    out << json{{"summary", true}, {"repeats", repeat}, {"stable", stable}}.dump() << '\n';
    log.Event(LogLevel::kInfo, "bench_done", {{"stable", stable ? "yes" : "no"}});
    return kExitOk;
  }
};

struct GenModelCmd {
  std::string shape;
  uint64_t seed = 1;
  int input_length = 40;
  std::string name = "random";
  std::vector<std::string> labels;
  std::string out_path;

  int Run(std::ostream& out) {
    QuantizedModel m = GenRandomModel(shape, seed, input_length);
    m.name = name;
    if (!labels.empty()) m.labels = labels;
    WriteModel(out_path, m);
    out << "sha256:" << ModelChecksum(m) << '\n';
    return kExitOk;
  }
};

struct GenInputsCmd {
  std::string model = DefaultModelPath();
  uint64_t seed = 1;
  size_t count = 1;
  std::string out_path;
  bool vectors = false;

  int Run(std::ostream& out) {
    const QuantizedModel m = LoadModel(model);
    const auto ins = GenRandomInputs(m, count, seed);
    if (vectors) {
      WriteTestVectors(out_path, MakeTestVectors(m, ins));
      out << out_path << '\n';
      return kExitOk;
    }
    for (size_t i = 0; i < ins.size(); ++i) {
      const std::string p = count == 1 ? out_path : out_path + "." + std::to_string(i);
      WriteInput(p, {ins[i], ModelChecksum(m)});
      out << p << '\n';
    }
    return kExitOk;
  }
};

}  // namespace

std::string DefaultModelPath() {
  return (std::filesystem::path(OBLIV1D_SOURCE_DIR) / "models" / "tiny.qmodel").string();
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Log log(err);
  CLI::App app{"Private 1-D CNN inference over secret sharing", "obliv1d"};
  app.require_subcommand(1);

  OracleCmd oracle;
  auto* c_oracle = app.add_subcommand("oracle", "plaintext integer inference");
  c_oracle->add_option("--model", oracle.model, "model file");
  c_oracle->add_option("--input", oracle.inputs, "input vector file(s)");
  c_oracle->add_flag("--trace", oracle.trace, "print per-layer outputs");

  LocalSimCmd sim;
  auto* c_sim = app.add_subcommand("local-sim", "all roles in one process");
  sim.flags.Add(c_sim);
  c_sim->add_option("--model", sim.model, "model file");
  c_sim->add_option("--input", sim.inputs, "input vector file(s)");
  c_sim->add_option("--seed", sim.seed, "session seed");
  c_sim->add_option("--preproc-dir", sim.preproc_dir, "use dealer files written here");

  DealerCmd dealer;
  auto* c_dealer = app.add_subcommand("dealer", "write per-node preprocessing files");
  dealer.flags.Add(c_dealer);
  c_dealer->add_option("--model", dealer.model, "model or architecture file");
  c_dealer->add_option("--batch", dealer.batch, "inputs per session");
  c_dealer->add_option("--out", dealer.out_dir, "output directory")->required();
  c_dealer->add_option("--seed", dealer.seed, "dealer seed (default: random)");

  PartyCmd party;
  auto* c_party = app.add_subcommand("party", "run one node over TCP");
  party.flags.Add(c_party);
  c_party->add_option("--role", party.role, "alice|bob|third-party|s1|s2|s3")->required();
  c_party->add_option("--model", party.model, "Bob's model");
  c_party->add_option("--input", party.inputs, "Alice's input vector file(s)");
  c_party->add_option("--peers", party.peers, "role=host:port,...")->required();
  c_party->add_option("--preproc", party.preproc, "this node's dealer file");
  c_party->add_option("--session", party.session, "session id shared by all nodes");
  c_party->add_option("--timeout", party.timeout_s, "connect timeout in seconds");

  BenchCmd bench;
  auto* c_bench = app.add_subcommand("bench", "repeat local sessions and report costs");
  bench.flags.Add(c_bench);
  c_bench->add_option("--model", bench.model, "model file (default: random of --shape)");
  c_bench->add_option("--shape", bench.shape, "shape of the random model");
  c_bench->add_option("--pool", bench.pool, "public|secret pool divisor");
  c_bench->add_option("--repeat", bench.repeat, "number of runs");
  c_bench->add_option("--batch", bench.batch, "inputs per run");
  c_bench->add_option("--seed", bench.seed, "seed");

  GenModelCmd gen;
  auto* c_gen = app.add_subcommand("gen-model", "write a random model");
  c_gen->add_option("--shape", gen.shape, "e.g. conv:8x3,pool:2,dense:4")->required();
  c_gen->add_option("--seed", gen.seed, "seed");
  c_gen->add_option("--input-length", gen.input_length, "input length");
  c_gen->add_option("--name", gen.name, "model name");
  c_gen->add_option("--labels", gen.labels, "class names")->delimiter(',');
  c_gen->add_option("--out", gen.out_path, "output file")->required();

  GenInputsCmd gin;
  auto* c_gin = app.add_subcommand("gen-inputs", "write random inputs or test vectors");
  c_gin->add_option("--model", gin.model, "model file");
  c_gin->add_option("--seed", gin.seed, "seed");
  c_gin->add_option("--count", gin.count, "number of inputs");
  c_gin->add_flag("--vectors", gin.vectors, "write one .qtest file with expected outputs");
  c_gin->add_option("--out", gin.out_path, "output file")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log.Event(LogLevel::kError, "usage", {{"message", e.what()}});
    err << app.help();
    return kExitUsage;
  }

  try {
    if (c_oracle->parsed()) return oracle.Run(out);
    if (c_sim->parsed()) return sim.Run(out, log);
    if (c_dealer->parsed()) return dealer.Run(out, log);
    if (c_party->parsed()) return party.Run(out, log);
    if (c_bench->parsed()) return bench.Run(out, log);
    if (c_gen->parsed()) return gen.Run(out);
    if (c_gin->parsed()) return gin.Run(out);
  } catch (...) {
    std::string msg;
    const ErrorKind kind = ClassifyCurrentException(&msg);
    log.Event(LogLevel::kError, kind == ErrorKind::kAbort ? "abort" : "failure",
              {{"kind", ErrorKindName(kind)}, {"message", msg}});
    return ExitCodeFor(kind);
  }
  return kExitUsage;
}

}  // namespace obliv1d
