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

#include <gtest/gtest.h>

#include "oracles.h"
#include "sheepdog/llm_gateway.h"
#include "sheepdog/prompts.h"

namespace sheepdog {
namespace {

using testing::CaughtCode;
using testing::TempDir;

std::vector<NewsArticle> Pool(int per_class) {
  std::vector<NewsArticle> out;
  for (int i = 0; i < per_class; ++i) {
    out.push_back({"r" + std::to_string(i), "real pool " + std::to_string(i), Label::kReal, i});
    out.push_back({"f" + std::to_string(i), "fake pool " + std::to_string(i), Label::kFake, i});
  }
  return out;
}

size_t Count(const std::string& haystack, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

TEST(ParseVerdictTest, FirstAlphabeticToken) {
  EXPECT_EQ(ParseVerdict("Real. The article cites sources.").label, VerdictLabel::kReal);
  EXPECT_EQ(ParseVerdict("Fake").label, VerdictLabel::kFake);
  EXPECT_EQ(ParseVerdict("  FAKE \xe2\x80\x94 because").label, VerdictLabel::kFake);
  EXPECT_EQ(ParseVerdict("\"real\"").label, VerdictLabel::kReal);
  EXPECT_EQ(ParseVerdict("realistic reporting here").label, VerdictLabel::kUnparseable);
  EXPECT_EQ(ParseVerdict("I cannot determine this.").label, VerdictLabel::kUnparseable);
  EXPECT_EQ(ParseVerdict("").label, VerdictLabel::kUnparseable);
  EXPECT_EQ(ParseVerdict("Fake news.").raw, "Fake news.");
}

TEST(IclConfigTest, ModesAndValidation) {
  EXPECT_EQ(IclConfig::ForMode(BaselineMode::kZeroShot, 0).k, 0);
  EXPECT_EQ(IclConfig::ForMode(BaselineMode::kIcl2, 0).k, 2);
  EXPECT_TRUE(IclConfig::ForMode(BaselineMode::kIcl2Reframed, 0).with_reframings);
  EXPECT_EQ(IclConfig::ForMode(BaselineMode::kIcl4, 0).k, 4);
  EXPECT_THROW((IclConfig{4, true, 0}.Validate()), Error);
  EXPECT_THROW((IclConfig{3, false, 0}.Validate()), Error);
  EXPECT_EQ(CaughtCode([] { BaselineModeFromName("icl8"); }), ErrorCode::kUsage);
}

TEST(DemonstrationTest, ClassBalancedAndSeeded) {
  const auto pool = Pool(10);
  for (int k : {2, 4}) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      const auto demos = SelectDemonstrations(pool, k, seed);
      ASSERT_EQ(demos.size(), static_cast<size_t>(k));
      int real = 0;
      for (const auto& d : demos) real += d.label == Label::kReal;
      EXPECT_EQ(real, k / 2);
      const auto again = SelectDemonstrations(pool, k, seed);
      for (int i = 0; i < k; ++i) EXPECT_EQ(again[i].id, demos[i].id);
    }
  }
  EXPECT_EQ(CaughtCode([&] { SelectDemonstrations(Pool(1), 4, 0); }), ErrorCode::kInsufficientPool);
}

TEST(DemonstrationTest, RenderedBlocks) {
  const auto pool = Pool(3);
  const auto demos = SelectDemonstrations(pool, 2, 5);
  const std::string plain = RenderDemonstrations(demos, nullptr, 5);
  EXPECT_EQ(Count(plain, "Question: "), 2u);
  for (const auto& d : demos) {
    const std::string block = RenderPrompt(TemplateId::kZeroShotDetect, {{"article", d.text}}) +
                              (d.label == Label::kReal ? " Real" : " Fake");
    EXPECT_NE(plain.find(block), std::string::npos);
  }

  ReframingStore reframings;
  for (const auto& a : pool) {
    for (Tone t : kAllTones) reframings.Add({a.id, t, a.id + " as " + std::string(ToneName(t)), "", false});
  }
  const std::string with = RenderDemonstrations(demos, &reframings, 5);
  EXPECT_EQ(Count(with, "Question: "), 6u);
  for (const auto& d : demos) EXPECT_EQ(Count(with, d.id + " as "), 2u);
}

class BaselineDetectorTest : public ::testing::Test {
 protected:
  BaselineDetectorTest() {
    GatewayOptions o;
    o.mode = LlmMode::kMock;
    o.cache_dir = dir_ / "cache";
    gateway_ = std::make_unique<LlmGateway>(o, std::make_shared<ScriptedProvider>([](const CompletionRequest& r) {
                                              if (r.prompt.find("target-x") != std::string::npos) return std::string("Unsure.");
                                              return r.prompt.find("fake target") != std::string::npos
                                                         ? std::string("Fake. reasons")
                                                         : std::string("Real. reasons");
                                            }));
  }
  TempDir dir_;
  std::unique_ptr<LlmGateway> gateway_;
};

TEST_F(BaselineDetectorTest, ZeroShotPromptAndScoring) {
  BaselineDetector detector(*gateway_, "m", IclConfig::ForMode(BaselineMode::kZeroShot, 0));
  const std::vector<NewsArticle> targets = {{"a", "fake target one", Label::kFake, 1},
                                            {"b", "real target two", Label::kReal, 2},
                                            {"c", "target-x", Label::kReal, 3},
                                            {"d", "fake target four", Label::kReal, 4}};
  const auto verdicts = detector.DetectAll(targets);
  EXPECT_EQ(detector.Request(targets[0]).prompt,
            RenderPrompt(TemplateId::kZeroShotDetect, {{"article", "fake target one"}}));
  EXPECT_EQ(detector.Request(targets[0]).temperature, 0.0);
  EXPECT_EQ(verdicts[2].label, VerdictLabel::kUnparseable);

  const BaselineReport wrong = ScoreVerdicts(targets, verdicts, UnparseablePolicy::kTreatAsWrong);
  EXPECT_EQ(wrong.unparseable, 1);
  EXPECT_EQ(wrong.metrics.n, 4);
  EXPECT_DOUBLE_EQ(wrong.metrics.accuracy, 0.5);
  const BaselineReport excl = ScoreVerdicts(targets, verdicts, UnparseablePolicy::kExclude);
  EXPECT_EQ(excl.metrics.n, 3);
  EXPECT_DOUBLE_EQ(excl.metrics.accuracy, 2.0 / 3.0);
}

TEST_F(BaselineDetectorTest, InContextPromptCarriesDemonstrations) {
  const auto pool = Pool(4);
  BaselineDetector detector(*gateway_, "m", IclConfig::ForMode(BaselineMode::kIcl4, 9), pool);
  const NewsArticle target{"q", "fake target", Label::kFake, 1};
  const std::string prompt = detector.Request(target).prompt;
  EXPECT_EQ(prompt.rfind(detector.rendered_demonstrations() + "\n\nQuestion: ", 0), 0u);
  EXPECT_EQ(Count(prompt, "Question: "), 5u);
  EXPECT_EQ(Count(prompt, " Real\n\n") + Count(prompt, " Fake\n\n"), 4u);
  EXPECT_TRUE(prompt.ends_with("fake target\nAnswer:"));
  EXPECT_EQ(detector.Detect(target).label, VerdictLabel::kFake);
  EXPECT_EQ(detector.Request(target).tags.at("k"), "4");
}

}  // namespace
}  // namespace sheepdog
