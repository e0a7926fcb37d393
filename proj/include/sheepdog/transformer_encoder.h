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

#ifndef SHEEPDOG_TRANSFORMER_ENCODER_H_
#define SHEEPDOG_TRANSFORMER_ENCODER_H_

#include <mutex>
#include <string>
#include <sys/types.h>

#include <nlohmann/json.hpp>

#include "sheepdog/model.h"

namespace sheepdog {

// Encoder backed by an external worker process (tools/encoder_worker.py)
// that hosts a pretrained transformer and its optimizer. Requests and
// replies are single JSON lines over the worker's stdin/stdout.
//
//   {"op":"init","model":M,"max_length":L,"seed":S} -> {"dim":D}
//   {"op":"encode","texts":[...],"train":B}       -> {"h":[[...],...]}
//   {"op":"backward","grad":[[...],...]}          -> {"ok":true}
//   {"op":"step","lr":X}                          -> {"ok":true}
//   {"op":"save","dir":P} / {"op":"load","dir":P} -> {"ok":true}
//
// A reply carrying "error", or a dead worker, surfaces as an IO error.
class SubprocessEncoder : public TextEncoder {
 public:
  explicit SubprocessEncoder(const EncoderConfig& config, uint64_t seed = 0);
  ~SubprocessEncoder() override;
  SubprocessEncoder(const SubprocessEncoder&) = delete;
  SubprocessEncoder& operator=(const SubprocessEncoder&) = delete;

  EncoderKind kind() const override { return EncoderKind::kPretrainedTransformer; }
  int dim() const override { return dim_; }
  EncoderInput Prepare(std::string_view text) const override;
  Eigen::MatrixXd Encode(std::span<const EncoderInput* const> inputs) const override;
  void Backward(std::span<const EncoderInput* const> inputs, const Eigen::MatrixXd& grad) override;
  std::vector<ParamView> Parameters() override { return {}; }
  void SetTraining(bool training) override { training_ = training; }
  void Step(double learning_rate) override;
  void SaveExtra(const std::filesystem::path& dir) const override;
  void LoadExtra(const std::filesystem::path& dir) override;

 private:
  nlohmann::json Call(const nlohmann::json& request) const;

  EncoderConfig config_;
  int dim_ = 0;
  bool training_ = false;
  pid_t pid_ = -1;
  int to_worker_ = -1;
  int from_worker_ = -1;
  mutable std::string read_buffer_;
  mutable std::mutex mu_;
};

}  // namespace sheepdog

#endif  // SHEEPDOG_TRANSFORMER_ENCODER_H_
