// Copyright 2026 The SheepDog Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sheepdog/cli.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include "sheepdog/attacker.h"
#include "sheepdog/attributor.h"
#include "sheepdog/baseline_llm.h"
#include "sheepdog/consistency.h"
#include "sheepdog/corpus.h"
#include "sheepdog/error.h"
#include "sheepdog/evaluator.h"
#include "sheepdog/http_provider.h"
#include "sheepdog/llm_gateway.h"
#include "sheepdog/model.h"
#include "sheepdog/reframer.h"
#include "sheepdog/synthetic.h"
#include "sheepdog/trainer.h"
#include "sheepdog/util.h"

namespace sheepdog {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Globals {
  std::string work_dir = "work";
  std::string dataset = "default";
  std::string cache_dir;  // defaults to <work-dir>/llm_cache
  uint64_t seed = 0;
  bool seed_given = false;
  std::string llm_mode = "replay";
  std::string mock_style = "scripted";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string base_url = "https://api.openai.com";
  std::string provider_model = "gpt-3.5-turbo-0301";
  std::size_t max_concurrency = 4;
  std::string split_digest;
  bool verbose = false;
};

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& part : SplitString(s, ',')) {
    const std::string_view t = TrimWhitespace(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

// One write-once stage directory. Files go to a sibling temporary directory
// that is renamed into place by Commit, so an interrupted stage leaves
// nothing behind under the final name.
class StageWriter {
 public:
  StageWriter(fs::path final_dir, std::string stage, std::string command_line)
      : final_(std::move(final_dir)), stage_(std::move(stage)), command_line_(std::move(command_line)),
        started_(UtcNow()) {
    if (fs::exists(final_)) {
      throw Error(ErrorCode::kArtifactExists,
                  "stage output " + final_.string() + " already exists; stages are append-only");
    }
    tmp_ = final_.parent_path() / ("." + final_.filename().string() + ".tmp-" + std::to_string(::getpid()));
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
  }
  ~StageWriter() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(tmp_, ec);
    }
  }
  StageWriter(const StageWriter&) = delete;
  StageWriter& operator=(const StageWriter&) = delete;

  const fs::path& dir() const { return tmp_; }
  const fs::path& final_dir() const { return final_; }
  json& manifest() { return manifest_; }

  void Commit(const std::string& config_hash, std::optional<uint64_t> seed,
              std::optional<std::string> cache_digest) {
    json m;
    m["stage"] = stage_;
    m["command_line"] = command_line_;
    m["config_hash"] = config_hash;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["cache_digest"] = cache_digest ? json(*cache_digest) : json(nullptr);
    m["version"] = kVersion;
    m["started_at"] = started_;
    m["finished_at"] = UtcNow();
    for (auto& [k, v] : manifest_.items()) m[k] = v;
    WriteFileAtomic(tmp_ / "manifest.json", m.dump(2) + "\n");
    fs::rename(tmp_, final_);
    committed_ = true;
  }

 private:
  fs::path final_;
  fs::path tmp_;
  std::string stage_;
  std::string command_line_;
  std::string started_;
  json manifest_ = json::object();
  bool committed_ = false;
};

class Workspace {
 public:
  Workspace(const Globals& g, std::string command_line) : g_(g), command_line_(std::move(command_line)) {}

  fs::path dataset_dir() const { return fs::path(g_.work_dir) / g_.dataset; }
  fs::path corpus_dir() const { return dataset_dir() / "corpus"; }
  fs::path cache_dir() const {
    return g_.cache_dir.empty() ? fs::path(g_.work_dir) / "llm_cache" : fs::path(g_.cache_dir);
  }
  const std::string& command_line() const { return command_line_; }

  Corpus LoadCorpus() const {
    const fs::path p = corpus_dir() / "corpus.jsonl";
    if (!fs::exists(p)) {
      throw Error(ErrorCode::kMissingArtifact, "dataset '" + g_.dataset + "' has no ingested corpus (run ingest)");
    }
    return sheepdog::LoadCorpus(p);
  }

  std::string SplitDigest() const {
    if (!g_.split_digest.empty()) {
      if (!fs::exists(dataset_dir() / g_.split_digest / "split" / "split.json")) {
        throw Error(ErrorCode::kMissingArtifact, "no split '" + g_.split_digest + "' in dataset " + g_.dataset);
      }
      return g_.split_digest;
    }
    std::vector<std::string> found;
    if (fs::is_directory(dataset_dir())) {
      for (const auto& e : fs::directory_iterator(dataset_dir())) {
        if (fs::exists(e.path() / "split" / "split.json")) found.push_back(e.path().filename().string());
      }
    }
    if (found.empty()) throw Error(ErrorCode::kMissingArtifact, "dataset '" + g_.dataset + "' has no split (run split)");
    if (found.size() > 1) {
      std::sort(found.begin(), found.end());
      std::string list;
      for (const auto& f : found) list += " " + f;
      throw Error(ErrorCode::kUsage, "several splits exist; choose one with --split-digest:" + list);
    }
    return found.front();
  }

  Split LoadSplit() const { return sheepdog::LoadSplit(dataset_dir() / SplitDigest() / "split" / "split.json"); }
  fs::path StageDir(const std::string& stage) const { return dataset_dir() / SplitDigest() / stage; }

  fs::path RequireStage(const std::string& stage, const std::string& hint) const {
    const fs::path p = StageDir(stage);
    if (!fs::exists(p / "manifest.json")) {
      throw Error(ErrorCode::kMissingArtifact, "missing " + stage + " artifacts at " + p.string() + " (" + hint + ")");
    }
    return p;
  }

  std::unique_ptr<LlmGateway> MakeGateway() const {
    GatewayOptions o;
    o.mode = LlmModeFromName(g_.llm_mode);
    o.cache_dir = cache_dir();
    o.max_concurrency = std::max<std::size_t>(1, g_.max_concurrency);
    std::shared_ptr<CompletionProvider> provider;
    if (o.mode == LlmMode::kLive) {
      const char* key = std::getenv(g_.api_key_env.c_str());
      if (key == nullptr || *key == '\0') {
        throw Error(ErrorCode::kInvalidArgument, "environment variable " + g_.api_key_env + " is not set");
      }
      HttpProviderOptions h;
      h.base_url = g_.base_url;
      h.api_key = key;
      provider = std::make_shared<HttpProvider>(h);
    } else if (o.mode == LlmMode::kMock) {
      if (g_.mock_style != "scripted" && g_.mock_style != "echo") {
        throw Error(ErrorCode::kUsage, "--mock-style must be scripted or echo");
      }
      provider = std::make_shared<SyntheticLlm>(
          MakeSyntheticVocabulary(SyntheticSpec{}),
          g_.mock_style == "echo" ? SyntheticLlm::Mode::kEcho : SyntheticLlm::Mode::kScripted);
    }
    return std::make_unique<LlmGateway>(o, provider);
  }

  const Globals& globals() const { return g_; }

 private:
  const Globals& g_;
  std::string command_line_;
};

std::vector<NewsArticle> SelectSplit(const Corpus& corpus, const Split& split, const std::string& which) {
  if (which == "train") return corpus.select(split.train_ids);
  if (which == "test") return corpus.select(split.test_ids);
  throw Error(ErrorCode::kUsage, "--split must be train or test");
}

ReframingStore LoadReframings(const Workspace& ws) {
  const fs::path dir = ws.RequireStage("reframe", "run reframe, or pass --ablate-reframing");
  return ReframingStore::Load(dir / "reframings.jsonl");
}

// ---------------------------------------------------------------------------
// Subcommands

struct IngestArgs {
  std::string input;
  bool balanced = false;
};

void CmdIngest(const Workspace& ws, const IngestArgs& a, std::ostream& out) {
  const Corpus corpus = LoadCorpus(a.input, LoadOptions{a.balanced});
  fs::create_directories(ws.dataset_dir());
  StageWriter stage(ws.corpus_dir(), "ingest", ws.command_line());
  SaveCorpus(Corpus(ws.globals().dataset, corpus.articles()), stage.dir() / "corpus.jsonl");
  stage.manifest()["input"] = {{"path", a.input}, {"sha256", Sha256Hex(ReadFile(a.input))}};
  stage.manifest()["counts"] = {{"total", corpus.size()},
                                {"real", corpus.count(Label::kReal)},
                                {"fake", corpus.count(Label::kFake)}};
  stage.Commit(Sha256Hex(std::string("balanced=") + (a.balanced ? "1" : "0")).substr(0, 16), std::nullopt,
               std::nullopt);
  out << "ingested " << corpus.size() << " articles into " << ws.corpus_dir().string() << "\n";
}

struct SplitArgs {
  std::string method = "temporal";
  double fraction = 0.2;
};

void CmdSplit(const Workspace& ws, const SplitArgs& a, std::ostream& out) {
  const Corpus corpus = ws.LoadCorpus();
  Split split;
  if (a.method == "temporal") {
    split = TemporalSplit(corpus, a.fraction);
  } else if (a.method == "random") {
    split = RandomSplit(corpus, a.fraction, ws.globals().seed);
  } else {
    throw Error(ErrorCode::kUsage, "--method must be temporal or random");
  }
  const std::string digest = split.Digest();
  const fs::path dir = ws.dataset_dir() / digest;
  fs::create_directories(dir);
  StageWriter stage(dir / "split", "split", ws.command_line());
  SaveSplit(split, stage.dir() / "split.json");
  stage.manifest()["split_digest"] = digest;
  stage.manifest()["counts"] = {{"train", split.train_ids.size()}, {"test", split.test_ids.size()}};
  char frac[32];
  std::snprintf(frac, sizeof(frac), "%.17g", a.fraction);
  stage.Commit(Sha256Hex(a.method + ":" + frac).substr(0, 16),
               a.method == "random" ? std::optional<uint64_t>(ws.globals().seed) : std::nullopt, std::nullopt);
  out << digest << "\n";
}

struct ReframeArgs {
  std::string tone_set = "full";
};

void CmdReframe(const Workspace& ws, const ReframeArgs& a, std::ostream& out) {
  const Corpus corpus = ws.LoadCorpus();
  const Split split = ws.LoadSplit();
  const ToneSet tones = ToneSetFromName(a.tone_set);
  StageWriter stage(ws.StageDir("reframe"), "reframe", ws.command_line());
  auto gateway = ws.MakeGateway();
  Reframer reframer(*gateway, ws.globals().provider_model);
  const ReframingStore store = reframer.Pregenerate(corpus.select(split.train_ids), tones);
  store.Save(stage.dir() / "reframings.jsonl");
  stage.manifest()["tone_set"] = ToneSetLabel(tones.name);
  stage.manifest()["reframings"] = store.size();
  stage.manifest()["fallbacks"] = reframer.fallback_count();
  stage.Commit(Sha256Hex("tone_set=" + a.tone_set).substr(0, 16), std::nullopt, gateway->cache().Digest());
  out << "wrote " << store.size() << " reframings\n";
}

struct AttributeArgs {
  std::string tone_set = "full";
  bool reuse_original = false;
  bool originals_only = false;
};

void CmdAttribute(const Workspace& ws, const AttributeArgs& a, std::ostream& out) {
  const Corpus corpus = ws.LoadCorpus();
  const Split split = ws.LoadSplit();
  const ToneSet tones = ToneSetFromName(a.tone_set);
  std::optional<ReframingStore> reframings;
  if (!a.originals_only) {
    const fs::path dir = ws.RequireStage("reframe", "run reframe, or pass --originals-only");
    reframings = ReframingStore::Load(dir / "reframings.jsonl");
  }
  StageWriter stage(ws.StageDir("attribute"), "attribute", ws.command_line());
  auto gateway = ws.MakeGateway();
  Attributor attributor(*gateway, ws.globals().provider_model);
  const PseudoLabelStore labels = attributor.LabelTrainingSet(
      corpus.select(split.train_ids), reframings ? &*reframings : nullptr, tones,
      AttributeOptions{a.reuse_original});
  labels.Save(stage.dir() / "pseudo_labels.jsonl");
  stage.manifest()["labels"] = labels.size();
  stage.manifest()["unparseable"] = attributor.unparseable_count();
  stage.manifest()["reuse_original_attributions"] = a.reuse_original;
  stage.manifest()["originals_only"] = a.originals_only;
  stage.Commit(Sha256Hex("tone_set=" + a.tone_set + ";reuse=" + (a.reuse_original ? "1" : "0") +
                         ";originals_only=" + (a.originals_only ? "1" : "0"))
                   .substr(0, 16),
               std::nullopt, gateway->cache().Digest());
  out << "wrote " << labels.size() << " pseudo-labels\n";
}

struct AttackArgs {
  std::string sets = "A,B,C,D";
  bool allow_train = false;
  std::string split = "test";
};

void CmdAttack(const Workspace& ws, const AttackArgs& a, std::ostream& out) {
  const Corpus corpus = ws.LoadCorpus();
  const Split split = ws.LoadSplit();
  const std::vector<std::string> ids = SplitList(a.sets);
  if (ids.empty()) throw Error(ErrorCode::kUsage, "--sets is empty");
  std::vector<AdversarialSetSpec> specs;
  for (const auto& id : ids) specs.push_back(CanonicalAdversarialSet(id));
  const std::vector<NewsArticle> source = SelectSplit(corpus, split, a.split);
  StageWriter stage(ws.StageDir("attack"), "attack", ws.command_line());
  auto gateway = ws.MakeGateway();
  Attacker attacker(*gateway, ws.globals().provider_model);
  json sets = json::object();
  for (const auto& spec : specs) {
    const auto set = attacker.BuildSet(source, spec, AttackOptions{split.train_ids, a.allow_train});
    SaveAdversarialSet(set, stage.dir() / (spec.set_id + ".jsonl"));
    sets[spec.set_id] = {{"real_publisher", spec.real_publisher},
                         {"fake_publisher", spec.fake_publisher},
                         {"articles", set.size()}};
  }
  stage.manifest()["sets"] = sets;
  stage.manifest()["fallbacks"] = attacker.fallback_count();
  stage.Commit(Sha256Hex("sets=" + a.sets + ";split=" + a.split).substr(0, 16), std::nullopt,
               gateway->cache().Digest());
  out << "wrote " << specs.size() << " adversarial sets\n";
}

struct TrainArgs {
  std::string config_path;
  std::optional<int> epochs, batch_size, head_layers, hidden_dim;
  std::optional<double> learning_rate;
  bool ablate_reframing = false;
  bool ablate_attribution = false;
  std::string tone_set, kl_direction;
  std::vector<std::string> sets;
  int runs = 1;
  std::string name;
};

std::string DefaultTrainName(const TrainConfig& c) {
  std::string name = "sheepdog";
  if (c.ablate_reframing) name += "-R";
  if (c.ablate_attribution) name += "-A";
  if (c.head.layers == 2) name += "-mlp2";
  if (c.tone_set != ToneSetName::kFull) name += "-" + std::string(ToneSetLabel(c.tone_set));
  return name;
}

void CmdTrain(const Workspace& ws, const TrainArgs& a, std::ostream& out) {
  TrainConfig config;
  if (!a.config_path.empty()) config = TrainConfig::FromFile(a.config_path);
  if (ws.globals().seed_given) config.seed = ws.globals().seed;
  if (a.epochs) config.epochs = *a.epochs;
  if (a.batch_size) config.batch_size = *a.batch_size;
  if (a.learning_rate) config.learning_rate = *a.learning_rate;
  if (a.head_layers) config.head.layers = *a.head_layers;
  if (a.hidden_dim) config.head.hidden_dim = *a.hidden_dim;
  if (a.ablate_reframing) config.ablate_reframing = true;
  if (a.ablate_attribution) config.ablate_attribution = true;
  if (!a.tone_set.empty()) config.Set("tone_set", a.tone_set);
  if (!a.kl_direction.empty()) config.Set("kl_direction", a.kl_direction);
  for (const auto& kv : a.sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kUsage, "--set expects key=value, got '" + kv + "'");
    config.Set(TrimWhitespace(std::string_view(kv).substr(0, eq)), TrimWhitespace(std::string_view(kv).substr(eq + 1)));
  }
  if (a.runs < 1) throw Error(ErrorCode::kUsage, "--runs must be at least 1");
  TrainConfig::FromText(config.ToText());  // validates the merged config

  const Corpus corpus = ws.LoadCorpus();
  const Split split = ws.LoadSplit();
  const std::vector<NewsArticle> train = corpus.select(split.train_ids);
  std::optional<ReframingStore> reframings;
  std::optional<PseudoLabelStore> labels;
  if (!config.ablate_reframing) reframings = LoadReframings(ws);
  if (!config.ablate_attribution) {
    const fs::path dir = ws.RequireStage("attribute", "run attribute, or pass --ablate-attribution");
    labels = PseudoLabelStore::Load(dir / "pseudo_labels.jsonl");
  }

  const std::string name = a.name.empty() ? DefaultTrainName(config) : a.name;
  StageWriter stage(ws.StageDir("train-" + name), "train", ws.command_line());
  WriteFileAtomic(stage.dir() / "config.txt", config.ToText());
  json runs = json::array();
  const uint64_t base_seed = config.seed;
  for (int r = 0; r < a.runs; ++r) {
    TrainConfig run_config = config;
    run_config.seed = base_seed + static_cast<uint64_t>(r);
    const fs::path run_dir = stage.dir() / ("run-" + std::to_string(run_config.seed));
    TrainResult result = Train(run_config, train, reframings ? &*reframings : nullptr, labels ? &*labels : nullptr);
    result.model->Save(run_dir / "checkpoint");
    WriteLossTraceCsv(result.trace, run_dir / "loss_trace.csv");
    const std::vector<double> epochs = EpochMeanTotals(result.trace);
    runs.push_back({{"seed", run_config.seed}, {"epoch_mean_total", epochs}});
    out << "trained run seed " << run_config.seed << " final epoch loss " << epochs.back() << "\n";
  }
  stage.manifest()["name"] = name;
  stage.manifest()["runs"] = runs;
  stage.Commit(config.Hash(), base_seed, std::nullopt);
  out << "checkpoints in " << stage.final_dir().string() << "\n";
}

// Checkpoints of a train stage (run-<seed>/checkpoint), or a single
// checkpoint directory, keyed by seed.
std::map<uint64_t, fs::path> FindCheckpoints(const Workspace& ws, const std::string& ref) {
  fs::path p = ref;
  if (!fs::exists(p)) p = ws.StageDir(ref.rfind("train-", 0) == 0 ? ref : "train-" + ref);
  if (!fs::exists(p)) throw Error(ErrorCode::kMissingArtifact, "no checkpoint or train stage '" + ref + "'");
  std::map<uint64_t, fs::path> out;
  if (fs::exists(p / "params.bin")) {
    const json m = json::parse(ReadFile(p / "manifest.json"));
    out[m.at("seed").get<uint64_t>()] = p;
    return out;
  }
  for (const auto& e : fs::directory_iterator(p)) {
    const std::string n = e.path().filename().string();
    if (n.rfind("run-", 0) == 0 && fs::exists(e.path() / "checkpoint" / "params.bin")) {
      out[std::stoull(n.substr(4))] = e.path() / "checkpoint";
    }
  }
  if (out.empty()) throw Error(ErrorCode::kMissingArtifact, "no checkpoints under " + p.string());
  return out;
}

struct EvalArgs {
  std::string checkpoint;
  std::string sets;
  int runs = 0;  // 0 = every run in the stage
  std::string compare;
  std::string name;
};

struct SetMetrics {
  std::map<uint64_t, MetricsReport> by_seed;
};

std::map<std::string, SetMetrics> EvaluateRuns(const std::map<uint64_t, fs::path>& checkpoints,
                                               const std::map<std::string, std::vector<NewsArticle>>& sets) {
  std::map<std::string, SetMetrics> out;
  for (const auto& [seed, path] : checkpoints) {
    const auto model = DetectorModel::Load(path);
    for (const auto& [set_id, articles] : sets) out[set_id].by_seed[seed] = Evaluate(*model, articles);
  }
  return out;
}

void CmdEval(const Workspace& ws, const EvalArgs& a, std::ostream& out) {
  const Corpus corpus = ws.LoadCorpus();
  const Split split = ws.LoadSplit();
  std::map<uint64_t, fs::path> checkpoints = FindCheckpoints(ws, a.checkpoint);
  if (a.runs > 0) {
    if (checkpoints.size() < static_cast<size_t>(a.runs)) {
      throw Error(ErrorCode::kMissingArtifact, "asked for " + std::to_string(a.runs) + " runs, found " +
                                                   std::to_string(checkpoints.size()));
    }
    while (checkpoints.size() > static_cast<size_t>(a.runs)) checkpoints.erase(std::prev(checkpoints.end()));
  }

  std::vector<std::string> set_ids = SplitList(a.sets);
  const fs::path attack_dir = ws.StageDir("attack");
  if (set_ids.empty()) {
    set_ids.push_back("orig");
    if (fs::exists(attack_dir / "manifest.json")) {
      for (const auto& spec : CanonicalAdversarialSets()) {
        if (fs::exists(attack_dir / (spec.set_id + ".jsonl"))) set_ids.push_back(spec.set_id);
      }
    }
  }
  std::map<std::string, std::vector<NewsArticle>> sets;
  for (const auto& id : set_ids) {
    if (id == "orig") {
      sets[id] = corpus.select(split.test_ids);
    } else {
      const fs::path f = attack_dir / (id + ".jsonl");
      if (!fs::exists(f)) throw Error(ErrorCode::kMissingArtifact, "adversarial set " + id + " not generated (run attack)");
      sets[id] = AsArticles(LoadAdversarialSet(f));
    }
  }
  if (sets.count("orig") == 0) throw Error(ErrorCode::kUsage, "--sets must include orig");

  const auto results = EvaluateRuns(checkpoints, sets);
  json report;
  report["checkpoint"] = fs::path(a.checkpoint).filename().string();
  report["sets"] = set_ids;
  json runs = json::array();
  for (const auto& [seed, path] : checkpoints) {
    std::map<std::string, MetricsReport> adv;
    for (const auto& id : set_ids) {
      if (id != "orig") adv[id] = results.at(id).by_seed.at(seed);
    }
    const RobustnessReport rr = MakeRobustnessReport(results.at("orig").by_seed.at(seed), adv);
    json r = RobustnessToJson(rr);
    runs.push_back({{"seed", seed}, {"original", r["original"]}, {"adversarial", r["adversarial"]}});
  }
  report["runs"] = runs;

  // Seed-averaged metrics; the gap is the mean of per-run gaps.
  json mean = json::object();
  const double n = static_cast<double>(checkpoints.size());
  double orig_f1 = 0.0;
  for (const auto& [seed, m] : results.at("orig").by_seed) orig_f1 += m.macro_f1;
  orig_f1 /= n;
  RobustnessReport mean_report;
  for (const auto& id : set_ids) {
    double acc = 0.0, f1 = 0.0;
    for (const auto& [seed, m] : results.at(id).by_seed) {
      acc += m.accuracy;
      f1 += m.macro_f1;
    }
    json entry = {{"accuracy", acc / n}, {"macro_f1", f1 / n}};
    MetricsReport avg;
    avg.accuracy = acc / n;
    avg.macro_f1 = f1 / n;
    avg.n = static_cast<long>(sets.at(id).size());
    if (id == "orig") {
      mean_report.original = avg;
    } else {
      entry["gap"] = (orig_f1 - f1 / n) * 100.0;
      mean_report.sets.push_back({id, avg, (orig_f1 - f1 / n) * 100.0});
    }
    mean[id] = entry;
  }
  report["mean"] = mean;

  if (!a.compare.empty()) {
    const auto other = EvaluateRuns(FindCheckpoints(ws, a.compare), sets);
    json sig = json::object();
    for (const auto& id : set_ids) {
      std::vector<double> x, y;
      for (const auto& [seed, m] : results.at(id).by_seed) {
        auto it = other.at(id).by_seed.find(seed);
        if (it == other.at(id).by_seed.end()) continue;
        x.push_back(m.macro_f1);
        y.push_back(it->second.macro_f1);
      }
      sig[id] = SignificanceToJson(WilcoxonSignedRank(x, y));
    }
    report["compare"] = fs::path(a.compare).filename().string();
    report["significance"] = sig;
  }

  std::string name = a.name;
  if (name.empty()) {
    name = fs::path(a.checkpoint).filename().string();
    if (name.rfind("train-", 0) == 0) name = name.substr(6);
    if (!a.compare.empty()) name += "-vs-" + fs::path(a.compare).filename().string();
  }
  StageWriter stage(ws.StageDir("eval-" + name), "eval", ws.command_line());
  WriteFileAtomic(stage.dir() / "report.json", report.dump(2) + "\n");
  const std::string text = RobustnessToText(mean_report);
  WriteFileAtomic(stage.dir() / "report.txt", text);
  stage.Commit(Sha256Hex(a.sets + ";" + std::to_string(a.runs) + ";" + a.compare).substr(0, 16), std::nullopt,
               std::nullopt);
  out << text;
}

struct ExplainArgs {
  std::string checkpoint;
  std::string article_id;
};

void CmdExplain(const Workspace& ws, const ExplainArgs& a, std::ostream& out) {
  const Corpus corpus = ws.LoadCorpus();
  const auto checkpoints = FindCheckpoints(ws, a.checkpoint);
  const auto model = DetectorModel::Load(checkpoints.begin()->second);
  out << ExplanationToJson(Explain(*model, corpus.at(a.article_id))).dump(2) << "\n";
}

struct BaselineArgs {
  std::string mode = "zeroshot";
  std::string split = "test";
  std::string unparseable = "treat-as-wrong";
};

void CmdBaseline(const Workspace& ws, const BaselineArgs& a, std::ostream& out) {
  const BaselineMode mode = BaselineModeFromName(a.mode);
  UnparseablePolicy policy;
  if (a.unparseable == "treat-as-wrong") {
    policy = UnparseablePolicy::kTreatAsWrong;
  } else if (a.unparseable == "exclude") {
    policy = UnparseablePolicy::kExclude;
  } else {
    throw Error(ErrorCode::kUsage, "--unparseable must be treat-as-wrong or exclude");
  }
  const Corpus corpus = ws.LoadCorpus();
  const Split split = ws.LoadSplit();
  const std::vector<NewsArticle> targets = SelectSplit(corpus, split, a.split);
  std::optional<ReframingStore> reframings;
  if (mode == BaselineMode::kIcl2Reframed) reframings = LoadReframings(ws);
  StageWriter stage(ws.StageDir("baseline-" + a.mode + "-" + a.split), "baseline", ws.command_line());
  auto gateway = ws.MakeGateway();
  BaselineDetector detector(*gateway, ws.globals().provider_model, IclConfig::ForMode(mode, ws.globals().seed),
                            corpus.select(split.train_ids), reframings ? &*reframings : nullptr);
  const std::vector<Verdict> verdicts = detector.DetectAll(targets);
  json report = BaselineReportToJson(ScoreVerdicts(targets, verdicts, policy));
  report["mode"] = a.mode;
  json demos = json::array();
  for (const auto& d : detector.demonstrations()) demos.push_back(d.id);
  report["demonstrations"] = demos;
  WriteFileAtomic(stage.dir() / "report.json", report.dump(2) + "\n");
  std::string rows;
  for (size_t i = 0; i < targets.size(); ++i) {
    rows += json({{"article_id", targets[i].id}, {"verdict", VerdictLabelName(verdicts[i].label)}}).dump() + "\n";
  }
  WriteFileAtomic(stage.dir() / "verdicts.jsonl", rows);
  stage.Commit(Sha256Hex(a.mode + ";" + a.split + ";" + a.unparseable).substr(0, 16), ws.globals().seed,
               gateway->cache().Digest());
  out << report.dump(2) << "\n";
}

struct ConsistencyArgs {
  std::string split = "train";
  std::string tone = "objective";
  std::string direction = "both";
};

void CmdConsistency(const Workspace& ws, const ConsistencyArgs& a, std::ostream& out) {
  const Tone tone = ToneFromName(a.tone);
  std::vector<EntailDirection> directions;
  if (a.direction == "original" || a.direction == "both") directions.push_back(EntailDirection::kOriginalEntailsReframed);
  if (a.direction == "reframed" || a.direction == "both") directions.push_back(EntailDirection::kReframedEntailsOriginal);
  if (directions.empty()) throw Error(ErrorCode::kUsage, "--direction must be original, reframed or both");
  const Corpus corpus = ws.LoadCorpus();
  const Split split = ws.LoadSplit();
  const std::vector<NewsArticle> articles = SelectSplit(corpus, split, a.split);
  const ReframingStore reframings = LoadReframings(ws);
  std::vector<ConsistencyPair> pairs;
  for (const auto& art : articles) {
    const Reframing* r = reframings.Find(art.id, tone);
    if (r == nullptr) {
      throw Error(ErrorCode::kMissingArtifact,
                  "article '" + art.id + "' has no " + std::string(ToneName(tone)) + " reframing");
    }
    pairs.push_back({art.id, art.text, r->text});
  }
  StageWriter stage(ws.StageDir("consistency-" + std::string(ToneName(tone)) + "-" + a.split), "consistency",
                    ws.command_line());
  auto gateway = ws.MakeGateway();
  ConsistencyChecker checker(*gateway, ws.globals().provider_model);
  json report = json::object();
  for (EntailDirection d : directions) {
    const ConsistencyResult result = checker.Run(pairs, d);
    json r = ConsistencyToJson(result);
    report[std::string(EntailDirectionName(d))] = {
        {"rate", r["rate"]}, {"n", r["n"]}, {"unparseable_count", r["unparseable_count"]}};
  }
  WriteFileAtomic(stage.dir() / "report.json", report.dump(2) + "\n");
  stage.Commit(Sha256Hex(a.split + ";" + a.tone + ";" + a.direction).substr(0, 16), std::nullopt,
               gateway->cache().Digest());
  out << report.dump(2) << "\n";
}

struct SynthArgs {
  std::string output;
  int train_per_class = SyntheticSpec{}.train_per_class;
  int test_per_class = SyntheticSpec{}.test_per_class;
};

void CmdSynth(const Globals& g, const SynthArgs& a, std::ostream& out) {
  SyntheticSpec spec;
  spec.seed = g.seed;
  spec.train_per_class = a.train_per_class;
  spec.test_per_class = a.test_per_class;
  const SyntheticDataset ds = MakeSyntheticDataset(spec);
  SaveCorpus(ds.corpus, a.output);
  char frac[32];
  std::snprintf(frac, sizeof(frac), "%.17g", ds.test_fraction);
  out << "wrote " << ds.corpus.size() << " articles; temporal test fraction " << frac << "\n";
}

std::string JoinArgs(const std::vector<std::string>& args) {
  std::string s;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i > 0) s += ' ';
    s += args[i];
  }
  return s;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Style-robust fake news detection pipeline", args.empty() ? "sheepdog" : args[0]};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Globals g;
  app.add_option("--work-dir", g.work_dir, "Root directory for pipeline artifacts")->capture_default_str();
  app.add_option("--dataset", g.dataset, "Dataset name (artifact namespace)")->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, "LLM response cache (default <work-dir>/llm_cache)");
  app.add_option("--seed", g.seed, "Seed for random splits, training and demo selection")->capture_default_str();
  app.add_option("--llm-mode", g.llm_mode, "live | replay | mock")->capture_default_str();
  app.add_option("--mock-style", g.mock_style, "scripted | echo (mock mode only)")->capture_default_str();
  app.add_option("--api-key-env", g.api_key_env, "Environment variable holding the API key")->capture_default_str();
  app.add_option("--base-url", g.base_url, "Chat-completions endpoint base URL (live mode)")->capture_default_str();
  app.add_option("--provider-model", g.provider_model, "LLM model name")->capture_default_str();
  app.add_option("--max-concurrency", g.max_concurrency, "Concurrent LLM requests")->capture_default_str();
  app.add_option("--split-digest", g.split_digest, "Split to use when several exist");
  app.add_flag("-v,--verbose", g.verbose, "Log progress to stderr");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load and validate a JSONL corpus");
  c_ingest->add_option("--input", ingest.input, "Corpus JSONL file")->required();
  c_ingest->add_flag("--balanced", ingest.balanced, "Require equal REAL and FAKE counts");

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Create the train/test split");
  c_split->add_option("--method", split.method, "temporal | random")->capture_default_str();
  c_split->add_option("--fraction", split.fraction, "Test fraction per class")->capture_default_str();

  ReframeArgs reframe;
  auto* c_reframe = app.add_subcommand("reframe", "Pregenerate tone reframings of the training split");
  c_reframe->add_option("--tone-set", reframe.tone_set, "full | r1 | r2 | r3 | r4")->capture_default_str();

  AttributeArgs attribute;
  auto* c_attr = app.add_subcommand("attribute", "Elicit veracity attribution pseudo-labels");
  c_attr->add_option("--tone-set", attribute.tone_set, "full | r1 | r2 | r3 | r4")->capture_default_str();
  c_attr->add_flag("--reuse-original-attributions", attribute.reuse_original,
                   "Copy each original's labels to its reframings");
  c_attr->add_flag("--originals-only", attribute.originals_only, "Label original articles only");

  AttackArgs attack;
  auto* c_attack = app.add_subcommand("attack", "Build style-adversarial test sets");
  c_attack->add_option("--sets", attack.sets, "Comma-separated set ids")->capture_default_str();
  c_attack->add_option("--split", attack.split, "Split to restyle")->capture_default_str();
  c_attack->add_flag("--allow-train", attack.allow_train, "Permit restyling training articles");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Fine-tune the detector");
  c_train->add_option("--config", train.config_path, "key = value config file");
  c_train->add_option("--epochs", train.epochs);
  c_train->add_option("--batch-size", train.batch_size);
  c_train->add_option("--learning-rate", train.learning_rate);
  c_train->add_option("--head-layers", train.head_layers);
  c_train->add_option("--hidden-dim", train.hidden_dim);
  c_train->add_flag("--ablate-reframing", train.ablate_reframing, "Drop reframings and the style loss");
  c_train->add_flag("--ablate-attribution", train.ablate_attribution, "Drop the attribution loss");
  c_train->add_option("--tone-set", train.tone_set, "full | r1 | r2 | r3 | r4");
  c_train->add_option("--kl-direction", train.kl_direction, "forward | reverse | symmetric");
  c_train->add_option("--set", train.sets, "Extra config override key=value (repeatable)");
  c_train->add_option("--runs", train.runs, "Number of runs with consecutive seeds")->capture_default_str();
  c_train->add_option("--name", train.name, "Stage name (default derived from the variant)");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score checkpoints on original and adversarial test sets");
  c_eval->add_option("--checkpoint", eval.checkpoint, "Train stage name/dir or checkpoint dir")->required();
  c_eval->add_option("--sets", eval.sets, "Comma-separated: orig,A,B,C,D (default: orig + generated sets)");
  c_eval->add_option("--runs", eval.runs, "Evaluate the first N runs (0 = all)")->capture_default_str();
  c_eval->add_option("--compare", eval.compare, "Second train stage for a paired Wilcoxon test by seed");
  c_eval->add_option("--name", eval.name, "Stage name");

  ExplainArgs explain;
  auto* c_explain = app.add_subcommand("explain", "Top attribution for one article");
  c_explain->add_option("--checkpoint", explain.checkpoint)->required();
  c_explain->add_option("--article-id", explain.article_id)->required();

  BaselineArgs baseline;
  auto* c_base = app.add_subcommand("baseline", "Zero-shot / in-context LLM detection baseline");
  c_base->add_option("--mode", baseline.mode, "zeroshot | icl2 | icl2r | icl4")->capture_default_str();
  c_base->add_option("--split", baseline.split, "train | test")->capture_default_str();
  c_base->add_option("--unparseable", baseline.unparseable, "treat-as-wrong | exclude")->capture_default_str();

  ConsistencyArgs consistency;
  auto* c_cons = app.add_subcommand("consistency", "Claim entailment between originals and reframings");
  c_cons->add_option("--split", consistency.split, "train | test")->capture_default_str();
  c_cons->add_option("--tone", consistency.tone, "Reframing tone")->capture_default_str();
  c_cons->add_option("--direction", consistency.direction, "original | reframed | both")->capture_default_str();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write the synthetic style-shift corpus");
  c_synth->add_option("--output", synth.output, "Output JSONL path")->required();
  c_synth->add_option("--train-per-class", synth.train_per_class)->capture_default_str();
  c_synth->add_option("--test-per-class", synth.test_per_class)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: USAGE: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }
  g.seed_given = app.count("--seed") > 0;

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("sheepdog", sink);
  logger->set_level(g.verbose ? spdlog::level::info : spdlog::level::warn);
  logger->set_pattern("[%l] %v");
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct RestoreLogger {
    std::shared_ptr<spdlog::logger> logger;
    ~RestoreLogger() { spdlog::set_default_logger(logger); }
  } restore{previous};

  CLI::App* sub = app.get_subcommands().front();
  try {
    Workspace ws(g, JoinArgs(args));
    if (sub == c_ingest) CmdIngest(ws, ingest, out);
    if (sub == c_split) CmdSplit(ws, split, out);
    if (sub == c_reframe) CmdReframe(ws, reframe, out);
    if (sub == c_attr) CmdAttribute(ws, attribute, out);
    if (sub == c_attack) CmdAttack(ws, attack, out);
    if (sub == c_train) CmdTrain(ws, train, out);
    if (sub == c_eval) CmdEval(ws, eval, out);
    if (sub == c_explain) CmdExplain(ws, explain, out);
    if (sub == c_base) CmdBaseline(ws, baseline, out);
    if (sub == c_cons) CmdConsistency(ws, consistency, out);
    if (sub == c_synth) CmdSynth(g, synth, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::kUsage) {
      err << sub->help();
      return kExitUsage;
    }
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

int RunCli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return RunCli(args, std::cout, std::cerr);
}

}  // namespace sheepdog
