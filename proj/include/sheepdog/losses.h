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

#ifndef SHEEPDOG_LOSSES_H_
#define SHEEPDOG_LOSSES_H_

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sheepdog/attributor.h"
#include "sheepdog/corpus.h"

namespace sheepdog {

// Which way the alignment KL runs between the original's veracity
// distribution P and a reframing's Q.
enum class KlDirection {
  kForward,    // KL(P || Q)
  kReverse,    // KL(Q || P)
  kSymmetric,  // (KL(P || Q) + KL(Q || P)) / 2
};
std::string_view KlDirectionName(KlDirection direction);
KlDirection KlDirectionFromName(std::string_view name);

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits);

// KL(softmax(a) || softmax(b)). Optional outputs receive d/da and d/db.
double KlFromLogits(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    Eigen::VectorXd* grad_a = nullptr, Eigen::VectorXd* grad_b = nullptr);

// Mean of the two divergences between the original and each reframing.
double StyleAlignmentLoss(const Eigen::VectorXd& original, const Eigen::VectorXd& reliable,
                          const Eigen::VectorXd& unreliable, KlDirection direction,
                          Eigen::VectorXd* grad_original = nullptr,
                          Eigen::VectorXd* grad_reliable = nullptr,
                          Eigen::VectorXd* grad_unreliable = nullptr);

// Cross-entropy of the veracity logits against the gold label.
double DetectionLoss(const Eigen::VectorXd& logits, Label label, Eigen::VectorXd* grad = nullptr);

// Numerically stable binary cross-entropy with logits, averaged over the
// four rationales.
double BinaryCrossEntropy(const Eigen::VectorXd& logits, const AttributionVector& target,
                          Eigen::VectorXd* grad = nullptr);

// Mean BCE over the supplied (logits, target) pairs: three for a full
// example, one when reframings are ablated.
double AttributionLoss(std::span<const Eigen::VectorXd* const> logits,
                       std::span<const AttributionVector* const> targets,
                       std::vector<Eigen::VectorXd>* grads = nullptr);

struct LossWeights {
  double style = 1.0;
  double news = 1.0;
  double attr = 1.0;
};

struct LossComponents {
  double style = 0.0;
  double news = 0.0;
  double attr = 0.0;
  double total = 0.0;
};

// Weighted sum, always accumulated as style, then news, then attr.
double CombineLosses(double style, double news, double attr, const LossWeights& weights);

}  // namespace sheepdog

#endif  // SHEEPDOG_LOSSES_H_
