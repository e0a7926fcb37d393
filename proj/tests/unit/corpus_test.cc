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

#include "sheepdog/corpus.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.h"
#include "sheepdog/rng.h"
#include "sheepdog/util.h"

namespace sheepdog {
namespace {

using testing::CaughtCode;
using testing::FixtureDir;
using testing::TempDir;

TEST(CorpusTest, LoadsFixtureAndCountsClasses) {
  const Corpus c = LoadCorpus(FixtureDir() / "temporal_corpus.jsonl");
  EXPECT_EQ(c.size(), 25u);
  EXPECT_EQ(c.count(Label::kReal), 10u);
  EXPECT_EQ(c.count(Label::kFake), 15u);
  EXPECT_EQ(c.at("f14").timestamp, 1500);
  EXPECT_EQ(c.find("nope"), nullptr);
}

TEST(CorpusTest, RejectsBadInput) {
  TempDir dir;
  WriteFileAtomic(dir / "dup.jsonl",
                  "{\"id\":\"a\",\"text\":\"x\",\"label\":\"real\"}\n{\"id\":\"a\",\"text\":\"y\",\"label\":\"fake\"}\n");
  EXPECT_EQ(CaughtCode([&] { LoadCorpus(dir / "dup.jsonl"); }), ErrorCode::kDuplicateId);

  WriteFileAtomic(dir / "bad.jsonl", "{\"id\":\"a\",\"text\":\"x\",\"label\":\"real\"}\n{not json\n");
  EXPECT_EQ(CaughtCode([&] { LoadCorpus(dir / "bad.jsonl"); }), ErrorCode::kMalformedRecord);

  WriteFileAtomic(dir / "label.jsonl", "{\"id\":\"a\",\"text\":\"x\",\"label\":\"maybe\"}\n");
  EXPECT_EQ(CaughtCode([&] { LoadCorpus(dir / "label.jsonl"); }), ErrorCode::kMalformedRecord);

  WriteFileAtomic(dir / "blank.jsonl", "{\"id\":\"a\",\"text\":\"   \",\"label\":\"real\"}\n");
  EXPECT_EQ(CaughtCode([&] { LoadCorpus(dir / "blank.jsonl"); }), ErrorCode::kMalformedRecord);

  WriteFileAtomic(dir / "empty.jsonl", "\n\n");
  EXPECT_EQ(CaughtCode([&] { LoadCorpus(dir / "empty.jsonl"); }), ErrorCode::kEmptyFile);

  EXPECT_EQ(CaughtCode([&] { LoadCorpus(FixtureDir() / "temporal_corpus.jsonl", LoadOptions{true}); }),
            ErrorCode::kClassImbalance);
}

TEST(CorpusTest, SaveLoadRoundTrip) {
  TempDir dir;
  const Corpus c = LoadCorpus(FixtureDir() / "temporal_corpus.jsonl");
  SaveCorpus(c, dir / "out.jsonl");
  const Corpus back = LoadCorpus(dir / "out.jsonl");
  ASSERT_EQ(back.size(), c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.articles()[i].id, c.articles()[i].id);
    EXPECT_EQ(back.articles()[i].text, c.articles()[i].text);
    EXPECT_EQ(back.articles()[i].label, c.articles()[i].label);
    EXPECT_EQ(back.articles()[i].timestamp, c.articles()[i].timestamp);
  }
}

TEST(SplitTest, TemporalSelectsHandEnumeratedMostRecent) {
  const Corpus c = LoadCorpus(FixtureDir() / "temporal_corpus.jsonl");
  const Split s = TemporalSplit(c, 0.2);
  // real: r03 (900) and r08 (800, beats r06 on the id tie-break).
  // fake: f03 (2000), f05 (1999), f14 (1500, beats f04).
  EXPECT_EQ(s.test_ids, (std::set<std::string>{"f03", "f05", "f14", "r03", "r08"}));
  EXPECT_EQ(s.train_ids.size(), 20u);
  for (const auto& id : s.test_ids) EXPECT_EQ(s.train_ids.count(id), 0u);
}

TEST(SplitTest, TemporalInvariantUnderCorpusOrder) {
  const Corpus c = LoadCorpus(FixtureDir() / "temporal_corpus.jsonl");
  const Split reference = TemporalSplit(c, 0.2);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<NewsArticle> articles = c.articles();
    rng.shuffle(articles);
    const Split s = TemporalSplit(Corpus("shuffled", articles), 0.2);
    EXPECT_EQ(s.test_ids, reference.test_ids);
    EXPECT_EQ(s.Digest(), reference.Digest());
  }
}

TEST(SplitTest, TemporalRequiresTimestamps) {
  Corpus c("x", {{"a", "text a", Label::kReal, std::nullopt}, {"b", "text b", Label::kFake, 5}});
  EXPECT_EQ(CaughtCode([&] { TemporalSplit(c, 0.2); }), ErrorCode::kMissingTimestamp);
}

TEST(SplitTest, RandomIsStratifiedSeededAndOrderFree) {
  const Corpus c = LoadCorpus(FixtureDir() / "temporal_corpus.jsonl");
  const Split a = RandomSplit(c, 0.2, 3);
  std::vector<NewsArticle> articles = c.articles();
  std::reverse(articles.begin(), articles.end());
  const Split b = RandomSplit(Corpus("rev", articles), 0.2, 3);
  EXPECT_EQ(a.test_ids, b.test_ids);
  long real = 0, fake = 0;
  for (const auto& id : a.test_ids) (c.at(id).label == Label::kReal ? real : fake)++;
  EXPECT_EQ(real, 2);
  EXPECT_EQ(fake, 3);
  EXPECT_NE(RandomSplit(c, 0.2, 4).Digest(), a.Digest());
}

TEST(SplitTest, SaveLoadRoundTrip) {
  TempDir dir;
  const Corpus c = LoadCorpus(FixtureDir() / "temporal_corpus.jsonl");
  const Split s = RandomSplit(c, 0.2, 9);
  SaveSplit(s, dir / "split.json");
  const Split back = LoadSplit(dir / "split.json");
  EXPECT_EQ(back.train_ids, s.train_ids);
  EXPECT_EQ(back.test_ids, s.test_ids);
  EXPECT_EQ(back.Digest(), s.Digest());
}

}  // namespace
}  // namespace sheepdog
