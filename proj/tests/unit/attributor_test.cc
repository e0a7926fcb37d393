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

#include "sheepdog/attributor.h"

#include <gtest/gtest.h>

#include <atomic>

#include "oracles.h"
#include "sheepdog/llm_gateway.h"

namespace sheepdog {
namespace {

using testing::CaughtCode;
using testing::TempDir;

AttributionVector Bits(int mask) {
  AttributionVector v;
  for (size_t k = 0; k < kNumRationales; ++k) v.bits[k] = (mask >> k) & 1;
  return v;
}

TEST(ParseAttributionsTest, InvertsFormattingForAllSubsets) {
  for (int mask = 0; mask < 16; ++mask) {
    const AttributionVector v = Bits(mask);
    const std::string text = FormatAttributions(v);
    const ParsedAttribution parsed = ParseAttributions(text);
    EXPECT_EQ(parsed.vector, v) << text;
    EXPECT_FALSE(parsed.unparseable) << text;
  }
  EXPECT_EQ(FormatAttributions(Bits(0)), "No problems");
}

TEST(ParseAttributionsTest, ReferenceResponse) {
  const ParsedAttribution p = ParseAttributions("False or misleading information, Biased opinion.");
  EXPECT_EQ(p.vector.bits, (std::array<int, 4>{0, 1, 1, 0}));
  EXPECT_FALSE(p.unparseable);
}

TEST(ParseAttributionsTest, OrderCaseAndPunctuationDoNotMatter) {
  const ParsedAttribution p =
      ParseAttributions("  inconsistencies with reputable sources;\nLACK OF CREDIBLE SOURCES!  ");
  EXPECT_EQ(p.vector.bits, (std::array<int, 4>{1, 0, 0, 1}));
  EXPECT_TRUE(ParseAttributions("No problems.").vector.all_zero());
  EXPECT_FALSE(ParseAttributions("No problems.").unparseable);
}

TEST(ParseAttributionsTest, UnrecognizedResponseIsFlagged) {
  const ParsedAttribution p = ParseAttributions("I cannot determine that.");
  EXPECT_TRUE(p.vector.all_zero());
  EXPECT_TRUE(p.unparseable);
}

class AttributorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    GatewayOptions o;
    o.mode = LlmMode::kMock;
    o.cache_dir = dir_ / "cache";
    gateway_ = std::make_unique<LlmGateway>(o, std::make_shared<ScriptedProvider>([this](const CompletionRequest& r) {
                                              ++calls_;
                                              return r.prompt.find("reframed") != std::string::npos
                                                         ? std::string("Biased opinion")
                                                         : std::string("Lack of credible sources, Biased opinion");
                                            }));
  }

  TempDir dir_;
  std::atomic<int> calls_{0};
  std::unique_ptr<LlmGateway> gateway_;
};

TEST_F(AttributorTest, RealArticlesNeverQueryTheLlm) {
  Attributor attributor(*gateway_, "m");
  const auto v = attributor.PseudoLabels({"r", "true story", Label::kReal, 1}, {"a", "b", "c"});
  ASSERT_EQ(v.size(), 3u);
  for (const auto& x : v) EXPECT_TRUE(x.all_zero());
  EXPECT_EQ(calls_.load(), 0);
  const auto f = attributor.PseudoLabels({"f", "false story", Label::kFake, 1}, {"false story"});
  EXPECT_EQ(f[0].bits, (std::array<int, 4>{1, 0, 1, 0}));
  EXPECT_EQ(calls_.load(), 1);
}

TEST_F(AttributorTest, RequestIsDeterministicAttributionPrompt) {
  Attributor attributor(*gateway_, "m");
  const CompletionRequest r = attributor.Request("Text.");
  EXPECT_EQ(r.temperature, 0.0);
  EXPECT_EQ(r.prompt.rfind("Article: Text.\nQuestion: ", 0), 0u);
}

TEST_F(AttributorTest, LabelsTrainingSetWithReframings) {
  const std::vector<NewsArticle> articles = {{"r1", "real one", Label::kReal, 1}, {"f1", "fake one", Label::kFake, 2}};
  ReframingStore reframings;
  for (const auto& a : articles) {
    for (Tone t : kAllTones) reframings.Add({a.id, t, "reframed " + a.id + " " + std::string(ToneName(t)), "", false});
  }
  Attributor attributor(*gateway_, "m");
  const PseudoLabelStore store = attributor.LabelTrainingSet(articles, &reframings, ToneSetFromName("full"));
  EXPECT_EQ(store.size(), 10u);
  EXPECT_EQ(calls_.load(), 5);
  for (const PseudoLabel* l : store.All()) {
    if (l->article_id == "r1") {
      EXPECT_TRUE(l->bits.all_zero());
      EXPECT_FALSE(l->raw_response.has_value());
    }
  }
  EXPECT_EQ(store.Find("f1", Variant::kOriginal)->bits.bits, (std::array<int, 4>{1, 0, 1, 0}));
  EXPECT_EQ(store.Find("f1", Variant::kUnreliable, Tone::kSensational)->bits.bits, (std::array<int, 4>{0, 0, 1, 0}));

  store.Save(dir_ / "labels.jsonl");
  const PseudoLabelStore back = PseudoLabelStore::Load(dir_ / "labels.jsonl");
  ASSERT_EQ(back.size(), store.size());
  for (const PseudoLabel* l : store.All()) {
    const PseudoLabel* b = back.Find(l->article_id, l->variant, l->tone);
    ASSERT_NE(b, nullptr);
    EXPECT_EQ(b->bits, l->bits);
    EXPECT_EQ(b->raw_response, l->raw_response);
  }
}

TEST_F(AttributorTest, ReuseCopiesOriginalLabels) {
  const std::vector<NewsArticle> articles = {{"f1", "fake one", Label::kFake, 2}};
  ReframingStore reframings;
  for (Tone t : kAllTones) reframings.Add({"f1", t, "reframed", "", false});
  Attributor attributor(*gateway_, "m");
  const PseudoLabelStore store =
      attributor.LabelTrainingSet(articles, &reframings, ToneSetFromName("full"), AttributeOptions{true});
  EXPECT_EQ(calls_.load(), 1);
  for (const PseudoLabel* l : store.All()) EXPECT_EQ(l->bits.bits, (std::array<int, 4>{1, 0, 1, 0}));
}

TEST_F(AttributorTest, MissingReframingIsReported) {
  ReframingStore reframings;
  reframings.Add({"f1", Tone::kNeutral, "x", "", false});
  Attributor attributor(*gateway_, "m");
  EXPECT_EQ(CaughtCode([&] {
              attributor.LabelTrainingSet({{"f1", "fake", Label::kFake, 1}}, &reframings, ToneSetFromName("full"));
            }),
            ErrorCode::kMissingArtifact);
}

}  // namespace
}  // namespace sheepdog
