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

#include "sheepdog/losses.h"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.h"

namespace sheepdog {
namespace {

using testing::OracleBce;
using testing::OracleCrossEntropy;
using testing::OracleKl;
using testing::OracleStyle;
using testing::RelativeError;
using testing::Widen;

Eigen::VectorXd V(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Eigen::VectorXd RandomLogits(Rng& rng, int n, double scale = 4.0) {
  return Eigen::VectorXd::NullaryExpr(n, [&] { return rng.uniform(-scale, scale); });
}

TEST(StyleLossTest, MatchesOracleAllDirections) {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto y = RandomLogits(rng, 2), r = RandomLogits(rng, 2), f = RandomLogits(rng, 2);
    for (KlDirection d : {KlDirection::kForward, KlDirection::kReverse, KlDirection::kSymmetric}) {
      const long double want = OracleStyle(Widen(y), Widen(r), Widen(f), d);
      const double got = StyleAlignmentLoss(y, r, f, d);
      EXPECT_LT(RelativeError(got, want), 1e-6) << KlDirectionName(d);
    }
  }
}

TEST(StyleLossTest, ReferenceValues) {
  EXPECT_EQ(StyleAlignmentLoss(V({1.5, -2}), V({1.5, -2}), V({1.5, -2}), KlDirection::kForward), 0.0);
  const double p = 1.0 / (1.0 + std::exp(-1.0));  // softmax(1, 0)[0]
  const double kl = 0.5 * std::log(0.5 / p) + 0.5 * std::log(0.5 / (1.0 - p));
  EXPECT_NEAR(StyleAlignmentLoss(V({0, 0}), V({1, 0}), V({0, 0}), KlDirection::kForward), 0.5 * kl, 1e-15);
  EXPECT_NEAR(p, 0.7311, 1e-4);
}

TEST(StyleLossTest, ShiftInvariantAndNonnegative) {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto y = RandomLogits(rng, 2), r = RandomLogits(rng, 2), f = RandomLogits(rng, 2);
    const double c = rng.uniform(-30, 30);
    const Eigen::VectorXd shift = Eigen::VectorXd::Constant(2, c);
    const double base = StyleAlignmentLoss(y, r, f, KlDirection::kForward);
    EXPECT_GE(base, 0.0);
    EXPECT_NEAR(StyleAlignmentLoss(y + shift, r + shift, f + shift, KlDirection::kForward), base, 1e-12);
  }
}

TEST(DetectionLossTest, MatchesOracleAndReferenceValues) {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const auto y = RandomLogits(rng, 2, 10.0);
    for (Label l : {Label::kReal, Label::kFake}) {
      EXPECT_LT(RelativeError(DetectionLoss(y, l), OracleCrossEntropy(Widen(y), LabelIndex(l))), 1e-6);
    }
  }
  EXPECT_NEAR(DetectionLoss(V({0, 0}), Label::kReal), std::log(2.0), 1e-15);
  EXPECT_NEAR(DetectionLoss(V({0, 0}), Label::kFake), std::log(2.0), 1e-15);
  EXPECT_NEAR(DetectionLoss(V({2, 0}), Label::kFake), 2.1269, 1e-4);
  EXPECT_LT(DetectionLoss(V({0, 60}), Label::kFake), 1e-20);
}

TEST(AttributionLossTest, MatchesOracleAndReferenceValues) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    std::array<Eigen::VectorXd, 3> logits;
    std::array<AttributionVector, 3> targets;
    long double want = 0.0L;
    for (int j = 0; j < 3; ++j) {
      logits[j] = RandomLogits(rng, 4, 6.0);
      for (auto& b : targets[j].bits) b = static_cast<int>(rng.uniform_index(2));
      want += OracleBce(Widen(logits[j]), targets[j].bits) / 3.0L;
    }
    const Eigen::VectorXd* lp[] = {&logits[0], &logits[1], &logits[2]};
    const AttributionVector* tp[] = {&targets[0], &targets[1], &targets[2]};
    EXPECT_LT(RelativeError(AttributionLoss(lp, tp), want), 1e-6);
  }

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  AttributionVector some;
  some.bits = {1, 0, 1, 1};
  const Eigen::VectorXd* zl[] = {&zero, &zero, &zero};
  const AttributionVector none;
  const AttributionVector* zt[] = {&some, &none, &some};
  EXPECT_NEAR(AttributionLoss(zl, zt), std::log(2.0), 1e-12);

  const Eigen::VectorXd one = V({1, 0, 0, 0});
  AttributionVector first;
  first.bits = {1, 0, 0, 0};
  const Eigen::VectorXd* ol[] = {&one, &one, &one};
  const AttributionVector* ot[] = {&first, &first, &first};
  EXPECT_NEAR(AttributionLoss(ol, ot), 0.5982, 1e-4);

  const Eigen::VectorXd sat = V({20, -20, 20, -20});
  AttributionVector match;
  match.bits = {1, 0, 1, 0};
  const Eigen::VectorXd* sl[] = {&sat};
  const AttributionVector* st[] = {&match};
  EXPECT_LT(AttributionLoss(sl, st), 1e-8);
}

TEST(LossGradientTest, AnalyticMatchesFiniteDifferences) {
  Rng rng(24);
  const double h = 1e-6;
  for (int i = 0; i < 30; ++i) {
    const auto y = RandomLogits(rng, 2), r = RandomLogits(rng, 2), f = RandomLogits(rng, 2);
    for (KlDirection d : {KlDirection::kForward, KlDirection::kReverse, KlDirection::kSymmetric}) {
      Eigen::VectorXd gy, gr, gf;
      StyleAlignmentLoss(y, r, f, d, &gy, &gr, &gf);
      for (int k = 0; k < 2; ++k) {
        Eigen::VectorXd up = y, dn = y;
        up(k) += h;
        dn(k) -= h;
        EXPECT_NEAR(gy(k), (StyleAlignmentLoss(up, r, f, d) - StyleAlignmentLoss(dn, r, f, d)) / (2 * h), 1e-7);
        up = r;
        dn = r;
        up(k) += h;
        dn(k) -= h;
        EXPECT_NEAR(gr(k), (StyleAlignmentLoss(y, up, f, d) - StyleAlignmentLoss(y, dn, f, d)) / (2 * h), 1e-7);
        up = f;
        dn = f;
        up(k) += h;
        dn(k) -= h;
        EXPECT_NEAR(gf(k), (StyleAlignmentLoss(y, r, up, d) - StyleAlignmentLoss(y, r, dn, d)) / (2 * h), 1e-7);
      }
    }
    Eigen::VectorXd g;
    DetectionLoss(y, Label::kFake, &g);
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd up = y, dn = y;
      up(k) += h;
      dn(k) -= h;
      EXPECT_NEAR(g(k), (DetectionLoss(up, Label::kFake) - DetectionLoss(dn, Label::kFake)) / (2 * h), 1e-7);
    }
    const auto s = RandomLogits(rng, 4);
    AttributionVector t;
    for (auto& b : t.bits) b = static_cast<int>(rng.uniform_index(2));
    BinaryCrossEntropy(s, t, &g);
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd up = s, dn = s;
      up(k) += h;
      dn(k) -= h;
      EXPECT_NEAR(g(k), (BinaryCrossEntropy(up, t) - BinaryCrossEntropy(dn, t)) / (2 * h), 1e-7);
    }
  }
}

TEST(CombineLossesTest, WeightedSumInFixedOrder) {
  EXPECT_DOUBLE_EQ(CombineLosses(0.1, 0.2, 0.3, {}), 0.1 + 0.2 + 0.3);
  EXPECT_EQ(CombineLosses(0.1, 0.2, 0.3, {}), (0.1 + 0.2) + 0.3);
  EXPECT_EQ(CombineLosses(0.1, 0.2, 0.3, {2.0, 1.0, 0.0}), 0.2 + 0.2);
  EXPECT_EQ(CombineLosses(0.0, 0.7, 0.0, {}), 0.7);
}

TEST(KlDirectionTest, Names) {
  EXPECT_EQ(KlDirectionFromName("reverse"), KlDirection::kReverse);
  EXPECT_EQ(KlDirectionName(KlDirection::kSymmetric), "symmetric");
  EXPECT_THROW(KlDirectionFromName("sideways"), Error);
}

}  // namespace
}  // namespace sheepdog
