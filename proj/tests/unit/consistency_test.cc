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

#include "sheepdog/consistency.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.h"
#include "sheepdog/llm_gateway.h"
#include "sheepdog/synthetic.h"

namespace sheepdog {
namespace {

using testing::CaughtCode;
using testing::TempDir;

EntailmentRecord Rec(const std::string& id, EntailAnswer a) {
  return {id, EntailDirection::kOriginalEntailsReframed, "claim", a};
}

TEST(ParseEntailmentTest, FirstToken) {
  EXPECT_EQ(ParseEntailment("Yes"), EntailAnswer::kYes);
  EXPECT_EQ(ParseEntailment("No, the article does not."), EntailAnswer::kNo);
  EXPECT_EQ(ParseEntailment("  yes."), EntailAnswer::kYes);
  EXPECT_EQ(ParseEntailment("Maybe"), EntailAnswer::kUnparseable);
  EXPECT_EQ(ParseEntailment("Nope"), EntailAnswer::kUnparseable);
  EXPECT_EQ(ParseEntailment(""), EntailAnswer::kUnparseable);
}

TEST(SummarizeTest, UnparseableStaysInDenominator) {
  std::vector<EntailmentRecord> records;
  for (int i = 0; i < 8; ++i) records.push_back(Rec("y" + std::to_string(i), EntailAnswer::kYes));
  records.push_back(Rec("n", EntailAnswer::kNo));
  records.push_back(Rec("u", EntailAnswer::kUnparseable));
  const ConsistencyResult r = SummarizeEntailment(EntailDirection::kOriginalEntailsReframed, records);
  EXPECT_DOUBLE_EQ(r.rate, 0.8);
  EXPECT_EQ(r.n, 10);
  EXPECT_EQ(r.unparseable, 1);

  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    rng.shuffle(records);
    EXPECT_EQ(SummarizeEntailment(EntailDirection::kOriginalEntailsReframed, records).rate, r.rate);
  }
  EXPECT_EQ(CaughtCode([] { SummarizeEntailment(EntailDirection::kReframedEntailsOriginal, {}); }),
            ErrorCode::kEmptyInput);
  const auto j = ConsistencyToJson(r);
  EXPECT_EQ(j["unparseable_count"], 1);
}

class CheckerTest : public ::testing::Test {
 protected:
  std::unique_ptr<LlmGateway> Gateway(std::shared_ptr<CompletionProvider> p) {
    GatewayOptions o;
    o.mode = LlmMode::kMock;
    o.cache_dir = dir_ / ("cache" + std::to_string(n_++));
    return std::make_unique<LlmGateway>(o, std::move(p));
  }
  TempDir dir_;
  int n_ = 0;
};

TEST_F(CheckerTest, EchoClaimIsArticleText) {
  auto gw = Gateway(std::make_shared<SyntheticLlm>(MakeSyntheticVocabulary(SyntheticSpec{}), SyntheticLlm::Mode::kEcho));
  ConsistencyChecker checker(*gw, "m");
  EXPECT_EQ(checker.ExtractClaim("The council approved the budget"), "The council approved the budget");
  EXPECT_EQ(checker.CheckEntailment("claim", "article"), EntailAnswer::kYes);
}

TEST_F(CheckerTest, EmptyClaimIsAnError) {
  auto gw = Gateway(std::make_shared<ScriptedProvider>([](const CompletionRequest&) { return " "; }));
  ConsistencyChecker checker(*gw, "m");
  EXPECT_EQ(CaughtCode([&] { checker.ExtractClaim("text"); }), ErrorCode::kEmptyClaim);
}

TEST_F(CheckerTest, DirectionChoosesClaimSourceAndTarget) {
  // Claim = first word of the article; entailed iff the other text contains it.
  auto gw = Gateway(std::make_shared<ScriptedProvider>([](const CompletionRequest& r) -> std::string {
    const std::string p = r.prompt;
    if (p.starts_with("Extract")) {
      const size_t s = p.find("Article: ") + 9;
      return p.substr(s, p.find(' ', s) - s);
    }
    const size_t c = p.find("the claim: ") + 11;
    const std::string claim = p.substr(c, p.find('?', c) - c);
    const std::string article = p.substr(p.find(" Article: ") + 10);
    return article.find(claim) != std::string::npos ? "Yes" : "No";
  }));
  ConsistencyChecker checker(*gw, "m");
  const std::vector<ConsistencyPair> pairs = {
      {"1", "alpha beta", "gamma alpha"},  // alpha in reframed; gamma not in original
      {"2", "delta", "delta"},
      {"3", "eps x", "zeta x"},
  };
  const ConsistencyResult fwd = checker.Run(pairs, EntailDirection::kOriginalEntailsReframed);
  EXPECT_EQ(fwd.yes, 2);
  EXPECT_EQ(fwd.no, 1);
  const ConsistencyResult back = checker.Run(pairs, EntailDirection::kReframedEntailsOriginal);
  EXPECT_EQ(back.yes, 1);
  EXPECT_EQ(back.records[0].claim, "gamma");
  EXPECT_EQ(fwd.records[0].claim, "alpha");
}

}  // namespace
}  // namespace sheepdog
