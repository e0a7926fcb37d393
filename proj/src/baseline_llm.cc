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

#include "sheepdog/baseline_llm.h"

#include <algorithm>

#include "sheepdog/error.h"
#include "sheepdog/prompts.h"
#include "sheepdog/rng.h"
#include "sheepdog/util.h"

namespace sheepdog {
namespace {

std::string_view VerdictWord(Label label) { return label == Label::kFake ? "Fake" : "Real"; }

std::string DemoBlock(std::string_view text, Label label) {
  return RenderPrompt(TemplateId::kZeroShotDetect, Slots{{"article", std::string(text)}}) + " " +
         std::string(VerdictWord(label));
}

bool IsAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

std::string_view VerdictLabelName(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::kReal:
      return "REAL";
    case VerdictLabel::kFake:
      return "FAKE";
    case VerdictLabel::kUnparseable:
      return "UNPARSEABLE";
  }
  return "UNPARSEABLE";
}

Verdict ParseVerdict(std::string_view response) {
  Verdict v;
  v.raw = std::string(response);
  size_t i = 0;
  while (i < response.size() && !IsAlpha(response[i])) ++i;
  size_t j = i;
  while (j < response.size() && IsAlpha(response[j])) ++j;
  const std::string token = ToLowerAscii(response.substr(i, j - i));
  if (token == "real") v.label = VerdictLabel::kReal;
  if (token == "fake") v.label = VerdictLabel::kFake;
  return v;
}

BaselineMode BaselineModeFromName(std::string_view name) {
  if (name == "zeroshot") return BaselineMode::kZeroShot;
  if (name == "icl2") return BaselineMode::kIcl2;
  if (name == "icl2r") return BaselineMode::kIcl2Reframed;
  if (name == "icl4") return BaselineMode::kIcl4;
  throw Error(ErrorCode::kUsage, "unknown baseline mode '" + std::string(name) +
                                     "' (expected zeroshot, icl2, icl2r or icl4)");
}

std::string_view BaselineModeName(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::kZeroShot:
      return "zeroshot";
    case BaselineMode::kIcl2:
      return "icl2";
    case BaselineMode::kIcl2Reframed:
      return "icl2r";
    case BaselineMode::kIcl4:
      return "icl4";
  }
  return "zeroshot";
}

IclConfig IclConfig::ForMode(BaselineMode mode, uint64_t demo_seed) {
  IclConfig c;
  c.demo_seed = demo_seed;
  switch (mode) {
    case BaselineMode::kZeroShot:
      break;
    case BaselineMode::kIcl2:
      c.k = 2;
      break;
    case BaselineMode::kIcl2Reframed:
      c.k = 2;
      c.with_reframings = true;
      break;
    case BaselineMode::kIcl4:
      c.k = 4;
      break;
  }
  return c;
}

void IclConfig::Validate() const {
  if (k != 0 && k != 2 && k != 4) throw Error(ErrorCode::kInvalidArgument, "ICL k must be 0, 2 or 4");
  if (with_reframings && k != 2) {
    throw Error(ErrorCode::kInvalidArgument, "reframed demonstrations are only defined for k = 2");
  }
}

std::vector<NewsArticle> SelectDemonstrations(const std::vector<NewsArticle>& pool, int k, uint64_t seed) {
  if (k == 0) return {};
  std::vector<NewsArticle> real, fake;
  for (const auto& a : pool) {
    if (a.label == Label::kReal) real.push_back(a);
    if (a.label == Label::kFake) fake.push_back(a);
  }
  const size_t per_class = static_cast<size_t>(k / 2);
  if (real.size() < per_class || fake.size() < per_class) {
    throw Error(ErrorCode::kInsufficientPool,
                "need " + std::to_string(per_class) + " REAL and " + std::to_string(per_class) +
                    " FAKE demonstrations, pool has " + std::to_string(real.size()) + " and " +
                    std::to_string(fake.size()));
  }
  auto by_id = [](const NewsArticle& x, const NewsArticle& y) { return x.id < y.id; };
  std::sort(real.begin(), real.end(), by_id);
  std::sort(fake.begin(), fake.end(), by_id);
  Rng rng(seed);
  rng.shuffle(real);
  rng.shuffle(fake);
  std::vector<NewsArticle> demos(real.begin(), real.begin() + static_cast<std::ptrdiff_t>(per_class));
  demos.insert(demos.end(), fake.begin(), fake.begin() + static_cast<std::ptrdiff_t>(per_class));
  rng.shuffle(demos);
  return demos;
}

std::string RenderDemonstrations(const std::vector<NewsArticle>& demos, const ReframingStore* reframings,
                                 uint64_t seed) {
  Rng rng(seed ^ 0xd1b54a32d192ed03ULL);
  const ToneSet tones = MakeToneSet(ToneSetName::kFull);
  std::vector<std::string> blocks;
  for (const auto& demo : demos) {
    blocks.push_back(DemoBlock(demo.text, demo.label));
    if (reframings != nullptr) {
      const ReframingPair pair = SampleTrainingPair(*reframings, demo.id, tones, rng);
      blocks.push_back(DemoBlock(pair.reliable->text, demo.label));
      blocks.push_back(DemoBlock(pair.unreliable->text, demo.label));
    }
  }
  std::string out;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += blocks[i];
  }
  return out;
}

BaselineReport ScoreVerdicts(const std::vector<NewsArticle>& articles, const std::vector<Verdict>& verdicts,
                             UnparseablePolicy policy) {
  if (articles.size() != verdicts.size()) {
    throw Error(ErrorCode::kInvalidArgument, "article and verdict counts differ");
  }
  if (articles.empty()) throw Error(ErrorCode::kEmptyTestSet, "no articles to score");
  BaselineReport report;
  report.policy = policy;
  std::vector<Label> truth, predicted;
  for (size_t i = 0; i < articles.size(); ++i) {
    const Label gold = articles[i].label;
    switch (verdicts[i].label) {
      case VerdictLabel::kReal:
        truth.push_back(gold);
        predicted.push_back(Label::kReal);
        break;
      case VerdictLabel::kFake:
        truth.push_back(gold);
        predicted.push_back(Label::kFake);
        break;
      case VerdictLabel::kUnparseable:
        ++report.unparseable;
        if (policy == UnparseablePolicy::kTreatAsWrong) {
          truth.push_back(gold);
          predicted.push_back(gold == Label::kReal ? Label::kFake : Label::kReal);
        }
        break;
    }
  }
  report.metrics = ComputeMetrics(truth, predicted);
  return report;
}

nlohmann::ordered_json BaselineReportToJson(const BaselineReport& report) {
  nlohmann::ordered_json j = MetricsToJson(report.metrics);
  j["unparseable"] = report.unparseable;
  j["unparseable_policy"] = report.policy == UnparseablePolicy::kTreatAsWrong ? "treat_as_wrong" : "exclude";
  return j;
}

BaselineDetector::BaselineDetector(LlmGateway& gateway, std::string provider_model, const IclConfig& config,
                                   const std::vector<NewsArticle>& train_pool,
                                   const ReframingStore* reframings)
    : gateway_(gateway), provider_model_(std::move(provider_model)), config_(config) {
  config_.Validate();
  if (config_.with_reframings && reframings == nullptr) {
    throw Error(ErrorCode::kMissingArtifact, "reframed demonstrations need pregenerated reframings");
  }
  demos_ = SelectDemonstrations(train_pool, config_.k, config_.demo_seed);
  rendered_ = RenderDemonstrations(demos_, config_.with_reframings ? reframings : nullptr, config_.demo_seed);
}

CompletionRequest BaselineDetector::Request(const NewsArticle& article) const {
  CompletionRequest request =
      config_.k == 0
          ? MakeRequest(TemplateId::kZeroShotDetect, Slots{{"article", article.text}}, provider_model_)
          : MakeRequest(TemplateId::kIclDetect, Slots{{"demonstrations", rendered_}, {"article", article.text}},
                        provider_model_);
  request.tags["article_id"] = article.id;
  request.tags["k"] = std::to_string(config_.k);
  return request;
}

Verdict BaselineDetector::Detect(const NewsArticle& article) {
  return ParseVerdict(gateway_.Complete(Request(article)).text);
}

std::vector<Verdict> BaselineDetector::DetectAll(const std::vector<NewsArticle>& articles) {
  std::vector<CompletionRequest> requests;
  for (const auto& a : articles) requests.push_back(Request(a));
  std::vector<BatchResult> results = gateway_.CompleteAll(requests);
  std::vector<Verdict> verdicts;
  for (auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    verdicts.push_back(ParseVerdict(r.response->text));
  }
  return verdicts;
}

}  // namespace sheepdog
