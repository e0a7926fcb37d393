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

#include <cmath>
#include <string>

#include "sheepdog/error.h"

namespace sheepdog {
namespace {

Eigen::VectorXd LogSoftmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

}  // namespace

std::string_view KlDirectionName(KlDirection direction) {
  switch (direction) {
    case KlDirection::kForward:
      return "forward";
    case KlDirection::kReverse:
      return "reverse";
    case KlDirection::kSymmetric:
      return "symmetric";
  }
  return "forward";
}

KlDirection KlDirectionFromName(std::string_view name) {
  if (name == "forward") return KlDirection::kForward;
  if (name == "reverse") return KlDirection::kReverse;
  if (name == "symmetric") return KlDirection::kSymmetric;
  throw Error(ErrorCode::kInvalidArgument, "unknown KL direction '" + std::string(name) + "'");
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits) { return LogSoftmax(logits).array().exp(); }

double KlFromLogits(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Eigen::VectorXd* grad_a,
                    Eigen::VectorXd* grad_b) {
  const Eigen::VectorXd log_p = LogSoftmax(a);
  const Eigen::VectorXd log_q = LogSoftmax(b);
  const Eigen::VectorXd p = log_p.array().exp();
  const Eigen::VectorXd diff = log_p - log_q;
  const double kl = p.dot(diff);
  if (grad_a != nullptr) *grad_a = p.array() * (diff.array() - kl);
  if (grad_b != nullptr) *grad_b = log_q.array().exp().matrix() - p;
  return kl;
}

double StyleAlignmentLoss(const Eigen::VectorXd& original, const Eigen::VectorXd& reliable,
                          const Eigen::VectorXd& unreliable, KlDirection direction,
                          Eigen::VectorXd* grad_original, Eigen::VectorXd* grad_reliable,
                          Eigen::VectorXd* grad_unreliable) {
  const bool want = grad_original != nullptr || grad_reliable != nullptr || grad_unreliable != nullptr;
  Eigen::VectorXd go = Eigen::VectorXd::Zero(original.size());
  Eigen::VectorXd gr = Eigen::VectorXd::Zero(reliable.size());
  Eigen::VectorXd gu = Eigen::VectorXd::Zero(unreliable.size());
  Eigen::VectorXd ga, gb;

  // One divergence term between the original and reframing `x`, scaled by
  // `w`, with gradients added into go and gx.
  auto term = [&](const Eigen::VectorXd& x, Eigen::VectorXd& gx, double w) {
    double value = 0.0;
    if (direction == KlDirection::kForward || direction == KlDirection::kSymmetric) {
      const double s = direction == KlDirection::kSymmetric ? 0.5 : 1.0;
      value += s * KlFromLogits(original, x, want ? &ga : nullptr, want ? &gb : nullptr);
      if (want) {
        go += (w * s) * ga;
        gx += (w * s) * gb;
      }
    }
    if (direction == KlDirection::kReverse || direction == KlDirection::kSymmetric) {
      const double s = direction == KlDirection::kSymmetric ? 0.5 : 1.0;
      value += s * KlFromLogits(x, original, want ? &ga : nullptr, want ? &gb : nullptr);
      if (want) {
        gx += (w * s) * ga;
        go += (w * s) * gb;
      }
    }
    return value;
  };

  const double loss = 0.5 * (term(reliable, gr, 0.5) + term(unreliable, gu, 0.5));
  if (grad_original != nullptr) *grad_original = go;
  if (grad_reliable != nullptr) *grad_reliable = gr;
  if (grad_unreliable != nullptr) *grad_unreliable = gu;
  return loss;
}

double DetectionLoss(const Eigen::VectorXd& logits, Label label, Eigen::VectorXd* grad) {
  const int gold = LabelIndex(label);
  const Eigen::VectorXd log_p = LogSoftmax(logits);
  if (grad != nullptr) {
    *grad = log_p.array().exp();
    (*grad)(gold) -= 1.0;
  }
  return -log_p(gold);
}

double BinaryCrossEntropy(const Eigen::VectorXd& logits, const AttributionVector& target,
                          Eigen::VectorXd* grad) {
  const auto n = static_cast<Eigen::Index>(kNumRationales);
  if (logits.size() != n) throw Error(ErrorCode::kInvalidArgument, "attribution logits must have 4 entries");
  double sum = 0.0;
  if (grad != nullptr) grad->resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = logits(k);
    const double z = target.bits[static_cast<size_t>(k)];
    // max(x, 0) - x z + log(1 + exp(-|x|))
    sum += std::max(x, 0.0) - x * z + std::log1p(std::exp(-std::abs(x)));
    if (grad != nullptr) {
      const double sigma = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      (*grad)(k) = (sigma - z) / static_cast<double>(n);
    }
  }
  return sum / static_cast<double>(n);
}

double AttributionLoss(std::span<const Eigen::VectorXd* const> logits,
                       std::span<const AttributionVector* const> targets,
                       std::vector<Eigen::VectorXd>* grads) {
  if (logits.size() != targets.size() || logits.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "attribution loss needs matching, non-empty inputs");
  }
  const double scale = 1.0 / static_cast<double>(logits.size());
  double sum = 0.0;
  if (grads != nullptr) grads->assign(logits.size(), Eigen::VectorXd());
  for (size_t i = 0; i < logits.size(); ++i) {
    Eigen::VectorXd g;
    sum += BinaryCrossEntropy(*logits[i], *targets[i], grads != nullptr ? &g : nullptr);
    if (grads != nullptr) (*grads)[i] = scale * g;
  }
  return sum * scale;
}

double CombineLosses(double style, double news, double attr, const LossWeights& weights) {
  double total = weights.style * style;
  total += weights.news * news;
  total += weights.attr * attr;
  return total;
}

}  // namespace sheepdog
