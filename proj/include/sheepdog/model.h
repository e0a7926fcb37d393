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

#ifndef SHEEPDOG_MODEL_H_
#define SHEEPDOG_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sheepdog/rng.h"

namespace sheepdog {

enum class EncoderKind { kToyHashedLinear, kPretrainedTransformer };
std::string_view EncoderKindName(EncoderKind kind);
EncoderKind EncoderKindFromName(std::string_view name);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kToyHashedLinear;
  int max_sequence_tokens = 512;
  int embedding_dim = 256;
  // Toy encoder only.
  int hash_buckets = 1024;
  int max_ngram = 2;
  uint64_t hash_seed = 0x5eedULL;
  // Transformer encoder only: command line of the encoder worker process
  // and the checkpoint it loads.
  std::string worker_command;
  std::string pretrained_name = "roberta-base";
};

struct HeadConfig {
  int layers = 1;  // 1 or 2
  int hidden_dim = 64;
};

// Mutable view of one parameter tensor and its gradient buffer.
struct ParamView {
  std::string name;
  std::span<double> value;
  std::span<double> grad;
};

// Backend-specific preprocessed text. The toy encoder fills `features`
// (hashed n-gram bucket, count); other backends keep the raw text.
struct EncoderInput {
  std::string text;
  std::vector<std::pair<uint32_t, double>> features;
};

class TextEncoder {
 public:
  virtual ~TextEncoder() = default;

  virtual EncoderKind kind() const = 0;
  virtual int dim() const = 0;
  virtual EncoderInput Prepare(std::string_view text) const = 0;

  // One column per input.
  virtual Eigen::MatrixXd Encode(std::span<const EncoderInput* const> inputs) const = 0;

  // Accumulates parameter gradients for the inputs of the preceding Encode
  // call given dLoss/dH (same column layout).
  virtual void Backward(std::span<const EncoderInput* const> inputs,
                        const Eigen::MatrixXd& grad) = 0;

  // Parameters updated by the in-process optimizer.
  virtual std::vector<ParamView> Parameters() = 0;

  // Training mode keeps whatever state Backward needs; eval mode may not.
  virtual void SetTraining(bool training) { (void)training; }

  // Hook for backends that own their optimizer state (called once per step).
  virtual void Step(double learning_rate) { (void)learning_rate; }

  // Backend-specific files next to the checkpoint manifest.
  virtual void SaveExtra(const std::filesystem::path& dir) const { (void)dir; }
  virtual void LoadExtra(const std::filesystem::path& dir) { (void)dir; }
};

// Lowercased runs of ASCII letters/digits; bytes >= 0x80 count as letters so
// UTF-8 words stay whole.
std::vector<std::string> Tokenize(std::string_view text);

// Seeded 64-bit FNV-1a.
uint64_t HashFeature(std::string_view feature, uint64_t seed);

// Bag of hashed n-grams (n = 1..max_ngram over the first
// max_sequence_tokens tokens) mapped through a trainable embedding table:
// h = sum over features of count * E[:, bucket].
class ToyHashedEncoder : public TextEncoder {
 public:
  ToyHashedEncoder(const EncoderConfig& config, Rng& init_rng);

  EncoderKind kind() const override { return EncoderKind::kToyHashedLinear; }
  int dim() const override { return static_cast<int>(embedding_.rows()); }
  EncoderInput Prepare(std::string_view text) const override;
  Eigen::MatrixXd Encode(std::span<const EncoderInput* const> inputs) const override;
  void Backward(std::span<const EncoderInput* const> inputs, const Eigen::MatrixXd& grad) override;
  std::vector<ParamView> Parameters() override;

  Eigen::MatrixXd& embedding() { return embedding_; }
  const Eigen::MatrixXd& embedding() const { return embedding_; }
  const EncoderConfig& config() const { return config_; }

 private:
  EncoderConfig config_;
  Eigen::MatrixXd embedding_;  // dim x hash_buckets
  Eigen::MatrixXd grad_;
};

// Linear layer, or Linear-ReLU-Linear when layers == 2.
class Head {
 public:
  struct Trace {
    Eigen::VectorXd input;
    Eigen::VectorXd hidden_pre;  // 2-layer only
  };

  Head(int in_dim, int out_dim, const HeadConfig& config, Rng& init_rng);

  Eigen::VectorXd Forward(const Eigen::VectorXd& h, Trace* trace = nullptr) const;
  // Accumulates parameter gradients; returns dLoss/dh.
  Eigen::VectorXd Backward(const Trace& trace, const Eigen::VectorXd& grad_out);

  int layers() const { return layers_; }
  Eigen::MatrixXd& weight(int layer) { return layer == 0 ? w1_ : w2_; }
  Eigen::VectorXd& bias(int layer) { return layer == 0 ? b1_ : b2_; }

  std::vector<ParamView> Parameters(const std::string& prefix);

 private:
  int layers_;
  Eigen::MatrixXd w1_, w2_;
  Eigen::VectorXd b1_, b2_;
  Eigen::MatrixXd gw1_, gw2_;
  Eigen::VectorXd gb1_, gb2_;
};

struct ModelOutputs {
  Eigen::VectorXd h;         // d
  Eigen::VectorXd y_logits;  // 2: REAL, FAKE
  Eigen::VectorXd s_logits;  // 4: canonical rationale order
};

struct CheckpointInfo {
  std::string optimizer = "adam(beta1=0.9,beta2=0.999,eps=1e-8)";
  std::string tone_set = "full";
  uint64_t seed = 0;
  bool attribution_trained = true;
};

// Shared encoder with a veracity head (2 logits) and an attribution head
// (4 logits). The same weights serve every input slot.
class DetectorModel {
 public:
  DetectorModel(const EncoderConfig& encoder_config, const HeadConfig& head_config, uint64_t seed);

  ModelOutputs Forward(std::string_view text) const;
  std::vector<ModelOutputs> Forward(std::span<const EncoderInput* const> inputs) const;
  // Outputs for an article and its reliable/unreliable reframings.
  std::array<ModelOutputs, 3> Forward(std::string_view original, std::string_view reliable,
                                      std::string_view unreliable) const;

  TextEncoder& encoder() { return *encoder_; }
  const TextEncoder& encoder() const { return *encoder_; }
  Head& veracity_head() { return veracity_; }
  Head& attribution_head() { return attribution_; }
  const Head& veracity_head() const { return veracity_; }
  const Head& attribution_head() const { return attribution_; }

  const EncoderConfig& encoder_config() const { return encoder_config_; }
  const HeadConfig& head_config() const { return head_config_; }
  CheckpointInfo& info() { return info_; }
  const CheckpointInfo& info() const { return info_; }

  // Encoder parameters first, then veracity head, then attribution head.
  std::vector<ParamView> Parameters();
  void ZeroGrad();

  // Directory with manifest.json and params.bin (+ backend extras).
  void Save(const std::filesystem::path& dir) const;
  static std::unique_ptr<DetectorModel> Load(const std::filesystem::path& dir);

 private:
  EncoderConfig encoder_config_;
  HeadConfig head_config_;
  std::unique_ptr<TextEncoder> encoder_;
  Head veracity_;
  Head attribution_;
  CheckpointInfo info_;
};

std::unique_ptr<TextEncoder> MakeEncoder(const EncoderConfig& config, Rng& init_rng);

}  // namespace sheepdog

#endif  // SHEEPDOG_MODEL_H_
