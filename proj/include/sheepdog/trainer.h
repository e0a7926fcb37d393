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

#ifndef SHEEPDOG_TRAINER_H_
#define SHEEPDOG_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sheepdog/attributor.h"
#include "sheepdog/corpus.h"
#include "sheepdog/losses.h"
#include "sheepdog/model.h"
#include "sheepdog/reframer.h"

namespace sheepdog {

struct TrainConfig {
  int epochs = 5;
  int batch_size = 4;
  // Constant Adam step size. 2e-5 suits a pretrained transformer; the toy
  // encoder trains from scratch and needs a larger step.
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  bool ablate_reframing = false;
  bool ablate_attribution = false;
  ToneSetName tone_set = ToneSetName::kFull;
  LossWeights loss_weights;
  KlDirection kl_direction = KlDirection::kForward;
  // Draw a fresh reliable/unreliable pair every epoch, or keep the first.
  bool resample_per_epoch = true;
  EncoderConfig encoder;
  HeadConfig head;

  // "key = value" lines; '#' starts a comment. Unknown keys are rejected.
  static TrainConfig FromText(std::string_view text);
  static TrainConfig FromFile(const std::filesystem::path& path);
  void Set(std::string_view key, std::string_view value);
  // Canonical "key = value" rendering (every key, fixed order).
  std::string ToText() const;
  std::string Hash() const;
};

struct LossTraceRow {
  int epoch = 0;  // 1-based
  int batch = 0;  // 1-based within the epoch
  LossComponents loss;
};

std::string LossTraceCsv(const std::vector<LossTraceRow>& trace);
void WriteLossTraceCsv(const std::vector<LossTraceRow>& trace, const std::filesystem::path& path);
// Mean total loss of each epoch, in epoch order.
std::vector<double> EpochMeanTotals(const std::vector<LossTraceRow>& trace);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8);

  // `params` must list the same tensors in the same order on every call.
  void Step(const std::vector<ParamView>& params);
  int steps() const { return steps_; }

 private:
  double learning_rate_, beta1_, beta2_, epsilon_;
  int steps_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// One training example with its prepared inputs. Reframing and attribution
// fields may be null when the corresponding component is ablated.
struct TrainingExample {
  Label label = Label::kUnlabeled;
  const EncoderInput* original = nullptr;
  const EncoderInput* reliable = nullptr;
  const EncoderInput* unreliable = nullptr;
  const AttributionVector* original_bits = nullptr;
  const AttributionVector* reliable_bits = nullptr;
  const AttributionVector* unreliable_bits = nullptr;
};

// Batch-mean loss components of the joint objective under `config`'s
// ablations, weights and KL direction. With `accumulate_grads`, adds the
// gradient of the total into the model's gradient buffers (and the encoder
// backend) without zeroing them first.
LossComponents ComputeBatchLoss(DetectorModel& model, const TrainConfig& config,
                                std::span<const TrainingExample> batch, bool accumulate_grads);

struct TrainResult {
  std::unique_ptr<DetectorModel> model;
  std::vector<LossTraceRow> trace;
};

// Joint objective: style alignment over a sampled reliable/unreliable
// reframing pair, veracity cross-entropy on the original, and attribution
// BCE on all three texts. Ablations drop the corresponding inputs.
//
// Throws MISSING_ARTIFACT when reframings (unless ablated) or pseudo-labels
// (unless ablated) are absent, MISSING_REFRAMING when an article lacks a tone
// of the configured set.
TrainResult Train(const TrainConfig& config, const std::vector<NewsArticle>& articles,
                  const ReframingStore* reframings, const PseudoLabelStore* labels);

// Plain cross-entropy fine-tuning of the same architecture; the reference
// that Train with both ablations must reproduce exactly.
TrainResult TrainCrossEntropy(const TrainConfig& config, const std::vector<NewsArticle>& articles);

}  // namespace sheepdog

#endif  // SHEEPDOG_TRAINER_H_
