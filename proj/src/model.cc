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

#include "sheepdog/model.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "sheepdog/attributor.h"
#include "sheepdog/error.h"
#include "sheepdog/transformer_encoder.h"
#include "sheepdog/util.h"

namespace sheepdog {
namespace {

using json = nlohmann::ordered_json;

constexpr char kParamsMagic[] = "SDPARAMS1\n";

bool IsTokenByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

void UniformInit(std::span<double> values, double scale, Rng& rng) {
  for (double& v : values) v = rng.uniform(-scale, scale);
}

std::span<double> Span(Eigen::MatrixXd& m) { return {m.data(), static_cast<size_t>(m.size())}; }
std::span<double> Span(Eigen::VectorXd& v) { return {v.data(), static_cast<size_t>(v.size())}; }

// Independent streams for each parameter group so that, e.g., changing the
// head depth does not perturb the encoder initialization.
constexpr uint64_t kEncoderStream = 0x9e3779b97f4a7c15ULL;
constexpr uint64_t kVeracityStream = 0xbf58476d1ce4e5b9ULL;
constexpr uint64_t kAttributionStream = 0x94d049bb133111ebULL;

}  // namespace

std::string_view EncoderKindName(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kToyHashedLinear:
      return "toy_hashed_linear";
    case EncoderKind::kPretrainedTransformer:
      return "pretrained_transformer";
  }
  return "unknown";
}

EncoderKind EncoderKindFromName(std::string_view name) {
  if (name == "toy_hashed_linear" || name == "toy") return EncoderKind::kToyHashedLinear;
  if (name == "pretrained_transformer" || name == "transformer") {
    return EncoderKind::kPretrainedTransformer;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown encoder kind '" + std::string(name) + "'");
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsTokenByte(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

uint64_t HashFeature(std::string_view feature, uint64_t seed) {
  uint64_t h = 14695981039346656037ULL ^ seed;
  for (char ch : feature) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// ToyHashedEncoder

ToyHashedEncoder::ToyHashedEncoder(const EncoderConfig& config, Rng& init_rng) : config_(config) {
  if (config.embedding_dim <= 0 || config.hash_buckets <= 0 || config.max_ngram <= 0 ||
      config.max_sequence_tokens <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "toy encoder sizes must be positive");
  }
  embedding_.resize(config.embedding_dim, config.hash_buckets);
  UniformInit(Span(embedding_), 0.1, init_rng);
  grad_ = Eigen::MatrixXd::Zero(embedding_.rows(), embedding_.cols());
}

EncoderInput ToyHashedEncoder::Prepare(std::string_view text) const {
  std::vector<std::string> tokens = Tokenize(text);
  if (tokens.size() > static_cast<size_t>(config_.max_sequence_tokens)) {
    tokens.resize(config_.max_sequence_tokens);
  }
  std::map<uint32_t, double> counts;
  const auto buckets = static_cast<uint64_t>(config_.hash_buckets);
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::string gram;
    for (int n = 1; n <= config_.max_ngram && i + n <= tokens.size(); ++n) {
      if (n > 1) gram.push_back(' ');
      gram += tokens[i + n - 1];
      counts[static_cast<uint32_t>(HashFeature(gram, config_.hash_seed) % buckets)] += 1.0;
    }
  }
  EncoderInput input;
  input.text = std::string(text);
  input.features.assign(counts.begin(), counts.end());
  return input;
}

Eigen::MatrixXd ToyHashedEncoder::Encode(std::span<const EncoderInput* const> inputs) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(embedding_.rows(), static_cast<Eigen::Index>(inputs.size()));
  for (size_t j = 0; j < inputs.size(); ++j) {
    for (const auto& [bucket, count] : inputs[j]->features) {
      out.col(static_cast<Eigen::Index>(j)) += count * embedding_.col(bucket);
    }
  }
  return out;
}

void ToyHashedEncoder::Backward(std::span<const EncoderInput* const> inputs,
                                const Eigen::MatrixXd& grad) {
  for (size_t j = 0; j < inputs.size(); ++j) {
    for (const auto& [bucket, count] : inputs[j]->features) {
      grad_.col(bucket) += count * grad.col(static_cast<Eigen::Index>(j));
    }
  }
}

std::vector<ParamView> ToyHashedEncoder::Parameters() {
  return {{"encoder.embedding", Span(embedding_), Span(grad_)}};
}

// ---------------------------------------------------------------------------
// Head

Head::Head(int in_dim, int out_dim, const HeadConfig& config, Rng& init_rng)
    : layers_(config.layers) {
  if (layers_ != 1 && layers_ != 2) {
    throw Error(ErrorCode::kInvalidArgument, "head layers must be 1 or 2");
  }
  const int first_out = layers_ == 1 ? out_dim : config.hidden_dim;
  w1_.resize(first_out, in_dim);
  UniformInit(Span(w1_), 1.0 / std::sqrt(static_cast<double>(in_dim)), init_rng);
  b1_ = Eigen::VectorXd::Zero(first_out);
  gw1_ = Eigen::MatrixXd::Zero(w1_.rows(), w1_.cols());
  gb1_ = Eigen::VectorXd::Zero(first_out);
  if (layers_ == 2) {
    w2_.resize(out_dim, config.hidden_dim);
    UniformInit(Span(w2_), 1.0 / std::sqrt(static_cast<double>(config.hidden_dim)), init_rng);
    b2_ = Eigen::VectorXd::Zero(out_dim);
    gw2_ = Eigen::MatrixXd::Zero(w2_.rows(), w2_.cols());
    gb2_ = Eigen::VectorXd::Zero(out_dim);
  }
}

Eigen::VectorXd Head::Forward(const Eigen::VectorXd& h, Trace* trace) const {
  Eigen::VectorXd z = w1_ * h + b1_;
  if (trace != nullptr) trace->input = h;
  if (layers_ == 1) return z;
  if (trace != nullptr) trace->hidden_pre = z;
  return w2_ * z.cwiseMax(0.0) + b2_;
}

Eigen::VectorXd Head::Backward(const Trace& trace, const Eigen::VectorXd& grad_out) {
  Eigen::VectorXd g = grad_out;
  if (layers_ == 2) {
    const Eigen::VectorXd hidden = trace.hidden_pre.cwiseMax(0.0);
    gw2_.noalias() += g * hidden.transpose();
    gb2_ += g;
    g = (w2_.transpose() * g).cwiseProduct(
        (trace.hidden_pre.array() > 0.0).cast<double>().matrix());
  }
  gw1_.noalias() += g * trace.input.transpose();
  gb1_ += g;
  return w1_.transpose() * g;
}

std::vector<ParamView> Head::Parameters(const std::string& prefix) {
  std::vector<ParamView> out{{prefix + ".w1", Span(w1_), Span(gw1_)},
                             {prefix + ".b1", Span(b1_), Span(gb1_)}};
  if (layers_ == 2) {
    out.push_back({prefix + ".w2", Span(w2_), Span(gw2_)});
    out.push_back({prefix + ".b2", Span(b2_), Span(gb2_)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// DetectorModel

std::unique_ptr<TextEncoder> MakeEncoder(const EncoderConfig& config, Rng& init_rng) {
  switch (config.kind) {
    case EncoderKind::kToyHashedLinear:
      return std::make_unique<ToyHashedEncoder>(config, init_rng);
    case EncoderKind::kPretrainedTransformer:
      return std::make_unique<SubprocessEncoder>(config, init_rng.next_u64());
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown encoder kind");
}

namespace {

std::unique_ptr<TextEncoder> EncoderForSeed(const EncoderConfig& config, uint64_t seed) {
  Rng rng(seed ^ kEncoderStream);
  return MakeEncoder(config, rng);
}

Head HeadForSeed(int in_dim, int out_dim, const HeadConfig& config, uint64_t seed) {
  Rng rng(seed);
  return Head(in_dim, out_dim, config, rng);
}

}  // namespace

DetectorModel::DetectorModel(const EncoderConfig& encoder_config, const HeadConfig& head_config,
                             uint64_t seed)
    : encoder_config_(encoder_config),
      head_config_(head_config),
      encoder_(EncoderForSeed(encoder_config, seed)),
      veracity_(HeadForSeed(encoder_->dim(), 2, head_config, seed ^ kVeracityStream)),
      attribution_(HeadForSeed(encoder_->dim(), kNumRationales, head_config,
                               seed ^ kAttributionStream)) {
  info_.seed = seed;
}

std::vector<ModelOutputs> DetectorModel::Forward(std::span<const EncoderInput* const> inputs) const {
  const Eigen::MatrixXd hs = encoder_->Encode(inputs);
  std::vector<ModelOutputs> out(inputs.size());
  for (size_t j = 0; j < inputs.size(); ++j) {
    out[j].h = hs.col(static_cast<Eigen::Index>(j));
    out[j].y_logits = veracity_.Forward(out[j].h);
    out[j].s_logits = attribution_.Forward(out[j].h);
  }
  return out;
}

ModelOutputs DetectorModel::Forward(std::string_view text) const {
  const EncoderInput input = encoder_->Prepare(text);
  const EncoderInput* ptr = &input;
  return std::move(Forward(std::span<const EncoderInput* const>(&ptr, 1)).front());
}

std::array<ModelOutputs, 3> DetectorModel::Forward(std::string_view original,
                                                   std::string_view reliable,
                                                   std::string_view unreliable) const {
  const EncoderInput a = encoder_->Prepare(original);
  const EncoderInput b = encoder_->Prepare(reliable);
  const EncoderInput c = encoder_->Prepare(unreliable);
  const std::array<const EncoderInput*, 3> ptrs{&a, &b, &c};
  std::vector<ModelOutputs> outs = Forward(ptrs);
  return {std::move(outs[0]), std::move(outs[1]), std::move(outs[2])};
}

std::vector<ParamView> DetectorModel::Parameters() {
  std::vector<ParamView> out = encoder_->Parameters();
  for (auto& p : veracity_.Parameters("veracity_head")) out.push_back(std::move(p));
  for (auto& p : attribution_.Parameters("attribution_head")) out.push_back(std::move(p));
  return out;
}

void DetectorModel::ZeroGrad() {
  for (auto& p : Parameters()) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

void DetectorModel::Save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto& self = const_cast<DetectorModel&>(*this);
  const std::vector<ParamView> params = self.Parameters();

  json manifest;
  manifest["format"] = "sheepdog-checkpoint/v1";
  json enc;
  enc["kind"] = EncoderKindName(encoder_config_.kind);
  enc["embedding_dim"] = encoder_->dim();
  enc["max_sequence_tokens"] = encoder_config_.max_sequence_tokens;
  if (encoder_config_.kind == EncoderKind::kToyHashedLinear) {
    enc["hash_buckets"] = encoder_config_.hash_buckets;
    enc["max_ngram"] = encoder_config_.max_ngram;
    enc["hash_seed"] = encoder_config_.hash_seed;
  } else {
    enc["pretrained_name"] = encoder_config_.pretrained_name;
    enc["worker_command"] = encoder_config_.worker_command;
  }
  manifest["encoder"] = enc;
  manifest["heads"] = {{"layers", head_config_.layers},
                       {"hidden_dim", head_config_.hidden_dim},
                       {"veracity_outputs", json::array({"REAL", "FAKE"})},
                       {"attribution_outputs", json::array()}};
  for (const auto& r : kCanonicalRationales) manifest["heads"]["attribution_outputs"].push_back(r);
  manifest["tone_set"] = info_.tone_set;
  manifest["seed"] = info_.seed;
  manifest["optimizer"] = info_.optimizer;
  manifest["attribution_trained"] = info_.attribution_trained;
  json plist = json::array();
  for (const auto& p : params) plist.push_back({{"name", p.name}, {"size", p.value.size()}});
  manifest["parameters"] = plist;

  std::string blob(kParamsMagic);
  for (const auto& p : params) {
    const auto* bytes = reinterpret_cast<const char*>(p.value.data());
    blob.append(bytes, p.value.size_bytes());
  }
  WriteFileAtomic(dir / "params.bin", blob);
  encoder_->SaveExtra(dir);
  WriteFileAtomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::unique_ptr<DetectorModel> DetectorModel::Load(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "manifest.json")) {
    throw Error(ErrorCode::kMissingArtifact, "no checkpoint manifest in " + dir.string());
  }
  json manifest;
  try {
    manifest = json::parse(ReadFile(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, "bad checkpoint manifest: " + std::string(e.what()));
  }
  try {
    EncoderConfig enc;
    const json& e = manifest.at("encoder");
    enc.kind = EncoderKindFromName(e.at("kind").get<std::string>());
    enc.embedding_dim = e.at("embedding_dim").get<int>();
    enc.max_sequence_tokens = e.at("max_sequence_tokens").get<int>();
    if (enc.kind == EncoderKind::kToyHashedLinear) {
      enc.hash_buckets = e.at("hash_buckets").get<int>();
      enc.max_ngram = e.at("max_ngram").get<int>();
      enc.hash_seed = e.at("hash_seed").get<uint64_t>();
    } else {
      enc.pretrained_name = e.at("pretrained_name").get<std::string>();
      enc.worker_command = e.at("worker_command").get<std::string>();
    }
    HeadConfig head;
    head.layers = manifest.at("heads").at("layers").get<int>();
    head.hidden_dim = manifest.at("heads").at("hidden_dim").get<int>();

    auto model = std::make_unique<DetectorModel>(enc, head, manifest.at("seed").get<uint64_t>());
    model->info_.tone_set = manifest.at("tone_set").get<std::string>();
    model->info_.optimizer = manifest.at("optimizer").get<std::string>();
    model->info_.attribution_trained = manifest.at("attribution_trained").get<bool>();

    const std::string blob = ReadFile(dir / "params.bin");
    const size_t magic_len = std::strlen(kParamsMagic);
    if (blob.compare(0, magic_len, kParamsMagic) != 0) {
      throw Error(ErrorCode::kMalformedRecord, "params.bin has an unknown format");
    }
    std::vector<ParamView> params = model->Parameters();
    const json& plist = manifest.at("parameters");
    if (plist.size() != params.size()) {
      throw Error(ErrorCode::kMalformedRecord, "checkpoint parameter list does not match model");
    }
    size_t offset = magic_len;
    for (size_t i = 0; i < params.size(); ++i) {
      if (plist[i].at("name").get<std::string>() != params[i].name ||
          plist[i].at("size").get<size_t>() != params[i].value.size()) {
        throw Error(ErrorCode::kMalformedRecord, "checkpoint parameter '" + params[i].name +
                                                     "' does not match model");
      }
      const size_t bytes = params[i].value.size_bytes();
      if (offset + bytes > blob.size()) {
        throw Error(ErrorCode::kMalformedRecord, "params.bin is truncated");
      }
      std::memcpy(params[i].value.data(), blob.data() + offset, bytes);
      offset += bytes;
    }
    if (offset != blob.size()) throw Error(ErrorCode::kMalformedRecord, "params.bin has trailing bytes");
    model->encoder_->LoadExtra(dir);
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, "bad checkpoint manifest: " + std::string(e.what()));
  }
}

}  // namespace sheepdog
