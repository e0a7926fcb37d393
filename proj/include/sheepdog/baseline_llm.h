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

#ifndef SHEEPDOG_BASELINE_LLM_H_
#define SHEEPDOG_BASELINE_LLM_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheepdog/corpus.h"
#include "sheepdog/evaluator.h"
#include "sheepdog/llm_gateway.h"
#include "sheepdog/reframer.h"

namespace sheepdog {

enum class VerdictLabel { kReal, kFake, kUnparseable };
std::string_view VerdictLabelName(VerdictLabel label);

struct Verdict {
  VerdictLabel label = VerdictLabel::kUnparseable;
  std::string raw;
};

// The first alphabetic token, case-insensitively, must be exactly "real" or
// "fake"; anything else is UNPARSEABLE.
Verdict ParseVerdict(std::string_view response);

enum class BaselineMode { kZeroShot, kIcl2, kIcl2Reframed, kIcl4 };
// "zeroshot", "icl2", "icl2r", "icl4". Throws USAGE on other names.
BaselineMode BaselineModeFromName(std::string_view name);
std::string_view BaselineModeName(BaselineMode mode);

struct IclConfig {
  int k = 0;  // 0, 2 or 4 demonstrations, half REAL and half FAKE
  bool with_reframings = false;
  uint64_t demo_seed = 0;

  static IclConfig ForMode(BaselineMode mode, uint64_t demo_seed);
  // Throws INVALID_ARGUMENT on an unsupported combination.
  void Validate() const;
};

// k/2 REAL and k/2 FAKE articles drawn from the pool with `seed`, in a
// seeded order. Throws INSUFFICIENT_POOL when a class has too few articles.
std::vector<NewsArticle> SelectDemonstrations(const std::vector<NewsArticle>& pool, int k, uint64_t seed);

// Each demonstration is the zero-shot prompt for the demo text followed by
// " Real" or " Fake"; demonstrations are separated by blank lines. With
// `reframings`, every demo is followed by one reliable- and one
// unreliable-style reframing carrying the same label.
std::string RenderDemonstrations(const std::vector<NewsArticle>& demos, const ReframingStore* reframings,
                                 uint64_t seed);

enum class UnparseablePolicy { kTreatAsWrong, kExclude };

struct BaselineReport {
  MetricsReport metrics;
  long unparseable = 0;
  UnparseablePolicy policy = UnparseablePolicy::kTreatAsWrong;
};

BaselineReport ScoreVerdicts(const std::vector<NewsArticle>& articles, const std::vector<Verdict>& verdicts,
                             UnparseablePolicy policy = UnparseablePolicy::kTreatAsWrong);
nlohmann::ordered_json BaselineReportToJson(const BaselineReport& report);

// Zero-shot or in-context LLM detector. The demonstrations are fixed at
// construction and shared by every query.
class BaselineDetector {
 public:
  BaselineDetector(LlmGateway& gateway, std::string provider_model, const IclConfig& config,
                   const std::vector<NewsArticle>& train_pool = {},
                   const ReframingStore* reframings = nullptr);

  CompletionRequest Request(const NewsArticle& article) const;
  Verdict Detect(const NewsArticle& article);
  // Concurrent through the gateway; rethrows the first failure.
  std::vector<Verdict> DetectAll(const std::vector<NewsArticle>& articles);

  const std::vector<NewsArticle>& demonstrations() const { return demos_; }
  const std::string& rendered_demonstrations() const { return rendered_; }

 private:
  LlmGateway& gateway_;
  std::string provider_model_;
  IclConfig config_;
  std::vector<NewsArticle> demos_;
  std::string rendered_;
};

}  // namespace sheepdog

#endif  // SHEEPDOG_BASELINE_LLM_H_
