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

#include "sheepdog/model.h"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.h"
#include "sheepdog/util.h"

namespace sheepdog {
namespace {

using testing::CaughtCode;
using testing::TempDir;

// Reference FNV-1a 64 with the seed folded into the offset basis.
uint64_t Fnv1a(std::string_view s, uint64_t seed) {
  uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

EncoderConfig SmallEncoder(int ngram = 2) {
  EncoderConfig c;
  c.embedding_dim = 16;
  c.hash_buckets = 64;
  c.max_ngram = ngram;
  return c;
}

TEST(TokenizeTest, LowercasesAlnumRuns) {
  EXPECT_EQ(Tokenize("Hello, World! 3x--y"), (std::vector<std::string>{"hello", "world", "3x", "y"}));
  EXPECT_TRUE(Tokenize("  ,;  ").empty());
  EXPECT_EQ(Tokenize("caf\xc3\xa9 ok"), (std::vector<std::string>{"caf\xc3\xa9", "ok"}));
}

TEST(HashFeatureTest, MatchesReferenceFnv) {
  for (const char* s : {"", "a", "a a", "breaking news"}) {
    EXPECT_EQ(HashFeature(s, 0x5eed), Fnv1a(s, 0x5eed)) << s;
    EXPECT_EQ(HashFeature(s, 0), Fnv1a(s, 0)) << s;
  }
}

TEST(ToyEncoderTest, CountBasedHashingByHand) {
  Rng rng(1);
  ToyHashedEncoder unigram(SmallEncoder(1), rng);
  const EncoderInput a = unigram.Prepare("a");
  const EncoderInput aa = unigram.Prepare("a a");
  const uint32_t bucket_a = static_cast<uint32_t>(Fnv1a("a", 0x5eed) % 64);
  ASSERT_EQ(a.features.size(), 1u);
  EXPECT_EQ(a.features[0], std::make_pair(bucket_a, 1.0));
  ASSERT_EQ(aa.features.size(), 1u);
  EXPECT_EQ(aa.features[0], std::make_pair(bucket_a, 2.0));
  const EncoderInput* ins[] = {&a, &aa};
  const Eigen::MatrixXd h = unigram.Encode(ins);
  EXPECT_TRUE(h.col(1).isApprox(2.0 * h.col(0)));

  Rng rng2(1);
  ToyHashedEncoder bigram(SmallEncoder(2), rng2);
  const EncoderInput aa2 = bigram.Prepare("a a");
  const uint32_t bucket_aa = static_cast<uint32_t>(Fnv1a("a a", 0x5eed) % 64);
  Eigen::VectorXd expected = 2.0 * bigram.embedding().col(bucket_a) + bigram.embedding().col(bucket_aa);
  const EncoderInput* one[] = {&aa2};
  EXPECT_TRUE(bigram.Encode(one).col(0).isApprox(expected));
}

TEST(ToyEncoderTest, TruncatesFromTheHead) {
  EncoderConfig c = SmallEncoder();
  c.max_sequence_tokens = 512;
  Rng rng(2);
  ToyHashedEncoder enc(c, rng);
  std::string long_text, head;
  for (int i = 0; i < 10000; ++i) {
    const std::string w = "w" + std::to_string(i % 997) + " ";
    long_text += w;
    if (i < 512) head += w;
  }
  EXPECT_EQ(enc.Prepare(long_text).features, enc.Prepare(head).features);
  EXPECT_NE(enc.Prepare(long_text).features, enc.Prepare(long_text.substr(0, 100)).features);
}

TEST(HeadTest, ZeroWeightsGiveBias) {
  Rng rng(3);
  Head head(16, 2, HeadConfig{1, 64}, rng);
  head.weight(0).setZero();
  head.bias(0) << 0.3, -0.3;
  Rng text_rng(4);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd h = Eigen::VectorXd::NullaryExpr(16, [&] { return text_rng.uniform(-5, 5); });
    const Eigen::VectorXd y = head.Forward(h);
    EXPECT_DOUBLE_EQ(y(0), 0.3);
    EXPECT_DOUBLE_EQ(y(1), -0.3);
  }
}

TEST(DetectorModelTest, ShapesDeterminismAndWeightSharing) {
  for (int layers : {1, 2}) {
    DetectorModel model(SmallEncoder(), HeadConfig{layers, 8}, 7);
    const ModelOutputs o = model.Forward("one story about the river");
    EXPECT_EQ(o.h.size(), 16);
    EXPECT_EQ(o.y_logits.size(), 2);
    EXPECT_EQ(o.s_logits.size(), 4);
    EXPECT_TRUE(o.y_logits.allFinite());
    EXPECT_EQ(model.Forward("one story about the river").y_logits, o.y_logits);

    const auto same = model.Forward("x y", "x y", "x y");
    EXPECT_EQ(same[0].y_logits, same[1].y_logits);
    EXPECT_EQ(same[1].s_logits, same[2].s_logits);

    const auto abc = model.Forward("alpha", "beta", "gamma");
    const auto cab = model.Forward("gamma", "alpha", "beta");
    EXPECT_EQ(abc[0].y_logits, cab[1].y_logits);
    EXPECT_EQ(abc[2].s_logits, cab[0].s_logits);
  }
  DetectorModel model(SmallEncoder(), HeadConfig{}, 7);
  EXPECT_EQ(model.Forward("").y_logits, model.veracity_head().Forward(Eigen::VectorXd::Zero(16)));
}

TEST(DetectorModelTest, SeedControlsInitialization) {
  DetectorModel a(SmallEncoder(), HeadConfig{}, 1), b(SmallEncoder(), HeadConfig{}, 1), c(SmallEncoder(), HeadConfig{}, 2);
  EXPECT_EQ(a.Forward("text").y_logits, b.Forward("text").y_logits);
  EXPECT_NE(a.Forward("text").y_logits, c.Forward("text").y_logits);
}

TEST(DetectorModelTest, CheckpointRoundTrip) {
  TempDir dir;
  DetectorModel model(SmallEncoder(), HeadConfig{2, 8}, 11);
  model.info().tone_set = "r2";
  model.info().seed = 11;
  for (const ParamView& p : model.Parameters()) {
    for (double& v : p.value) v = std::sin(v * 1000.0 + 0.5);
  }
  model.Save(dir / "ckpt");
  const auto back = DetectorModel::Load(dir / "ckpt");
  EXPECT_EQ(back->info().tone_set, "r2");
  EXPECT_EQ(back->head_config().layers, 2);
  for (const char* text : {"first text", "another article entirely", ""}) {
    const ModelOutputs x = model.Forward(text), y = back->Forward(text);
    EXPECT_EQ(x.y_logits, y.y_logits);
    EXPECT_EQ(x.s_logits, y.s_logits);
  }
  EXPECT_EQ(CaughtCode([&] { DetectorModel::Load(dir / "missing"); }), ErrorCode::kMissingArtifact);
  WriteFileAtomic(dir / "ckpt" / "params.bin", "SDPARAMS1\n");
  EXPECT_EQ(CaughtCode([&] { DetectorModel::Load(dir / "ckpt"); }), ErrorCode::kMalformedRecord);
}

TEST(DetectorModelTest, EncoderKindNames) {
  EXPECT_EQ(EncoderKindFromName("toy"), EncoderKind::kToyHashedLinear);
  EXPECT_EQ(EncoderKindFromName("pretrained_transformer"), EncoderKind::kPretrainedTransformer);
  EXPECT_EQ(EncoderKindName(EncoderKind::kToyHashedLinear), "toy_hashed_linear");
}

}  // namespace
}  // namespace sheepdog
