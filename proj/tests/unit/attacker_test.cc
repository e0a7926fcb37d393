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

#include "sheepdog/attacker.h"

#include <gtest/gtest.h>

#include "oracles.h"
#include "sheepdog/llm_gateway.h"

namespace sheepdog {
namespace {

using testing::CaughtCode;
using testing::TempDir;

std::vector<NewsArticle> Fixture() {
  std::vector<NewsArticle> out;
  for (int i = 0; i < 20; ++i) {
    out.push_back({"t" + std::to_string(i), "test article " + std::to_string(i),
                   i % 3 == 0 ? Label::kFake : Label::kReal, 100 + i});
  }
  return out;
}

class AttackerTest : public ::testing::Test {
 protected:
  AttackerTest() {
    GatewayOptions o;
    o.mode = LlmMode::kMock;
    o.cache_dir = dir_ / "cache";
    gateway_ = std::make_unique<LlmGateway>(o, std::make_shared<ScriptedProvider>([](const CompletionRequest& r) {
                                              return r.prompt.find("article 5") != std::string::npos
                                                         ? std::string()
                                                         : "restyled: " + r.prompt.substr(r.prompt.find(": ") + 2);
                                            }));
  }
  TempDir dir_;
  std::unique_ptr<LlmGateway> gateway_;
};

TEST(AdversarialSetsTest, PublisherTable) {
  EXPECT_EQ(CanonicalAdversarialSet("A").real_publisher, "National Enquirer");
  EXPECT_EQ(CanonicalAdversarialSet("A").fake_publisher, "CNN");
  EXPECT_EQ(CanonicalAdversarialSet("B").real_publisher, "National Enquirer");
  EXPECT_EQ(CanonicalAdversarialSet("B").fake_publisher, "The New York Times");
  EXPECT_EQ(CanonicalAdversarialSet("C").real_publisher, "The Sun");
  EXPECT_EQ(CanonicalAdversarialSet("C").fake_publisher, "CNN");
  EXPECT_EQ(CanonicalAdversarialSet("D").real_publisher, "The Sun");
  EXPECT_EQ(CanonicalAdversarialSet("D").fake_publisher, "The New York Times");
  EXPECT_EQ(CaughtCode([] { CanonicalAdversarialSet("E"); }), ErrorCode::kInvalidArgument);
}

TEST_F(AttackerTest, RoutesPublishersByLabelAndPreservesLabels) {
  Attacker attacker(*gateway_, "m");
  const auto articles = Fixture();
  for (const auto& spec : CanonicalAdversarialSets()) {
    const auto set = attacker.BuildSet(articles, spec);
    ASSERT_EQ(set.size(), articles.size());
    for (size_t i = 0; i < set.size(); ++i) {
      EXPECT_EQ(set[i].article_id, articles[i].id);
      EXPECT_EQ(set[i].label, articles[i].label);
      EXPECT_EQ(set[i].set_id, spec.set_id);
      EXPECT_EQ(set[i].publisher,
                articles[i].label == Label::kReal ? spec.real_publisher : spec.fake_publisher);
    }
  }
  int checked = 0;
  for (const CallRecord& rec : gateway_->CallLog()) {
    const NewsArticle* a = nullptr;
    for (const auto& x : articles) {
      if (x.id == rec.tags.at("article_id")) a = &x;
    }
    ASSERT_NE(a, nullptr);
    const auto& spec = CanonicalAdversarialSet(rec.tags.at("set_id"));
    EXPECT_EQ(rec.tags.at("publisher"), a->label == Label::kReal ? spec.real_publisher : spec.fake_publisher);
    ++checked;
  }
  EXPECT_EQ(checked, 80);
}

TEST_F(AttackerTest, EmptyResponseKeepsOriginalText) {
  Attacker attacker(*gateway_, "m");
  const auto set = attacker.BuildSet(Fixture(), CanonicalAdversarialSet("A"));
  EXPECT_TRUE(set[5].fallback);
  EXPECT_EQ(set[5].text, "test article 5");
  EXPECT_EQ(set[4].text, "restyled: test article 4");
  EXPECT_EQ(attacker.fallback_count(), 1u);
}

TEST_F(AttackerTest, RefusesTrainingArticlesUnlessAllowed) {
  Attacker attacker(*gateway_, "m");
  AttackOptions options;
  options.train_ids = {"t3"};
  EXPECT_EQ(CaughtCode([&] { attacker.BuildSet(Fixture(), CanonicalAdversarialSet("B"), options); }),
            ErrorCode::kTrainIdsRefused);
  options.allow_train = true;
  EXPECT_EQ(attacker.BuildSet(Fixture(), CanonicalAdversarialSet("B"), options).size(), 20u);
}

TEST_F(AttackerTest, SaveLoadRoundTrip) {
  Attacker attacker(*gateway_, "m");
  const auto set = attacker.BuildSet(Fixture(), CanonicalAdversarialSet("C"));
  SaveAdversarialSet(set, dir_ / "C.jsonl");
  const auto back = LoadAdversarialSet(dir_ / "C.jsonl");
  ASSERT_EQ(back.size(), set.size());
  for (size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back[i].article_id, set[i].article_id);
    EXPECT_EQ(back[i].text, set[i].text);
    EXPECT_EQ(back[i].label, set[i].label);
    EXPECT_EQ(back[i].set_id, "C");
  }
  const auto articles = AsArticles(back);
  EXPECT_EQ(articles[2].id, "t2");
  EXPECT_EQ(articles[2].label, Label::kReal);
}

}  // namespace
}  // namespace sheepdog
