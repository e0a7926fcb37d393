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

#ifndef SHEEPDOG_EVALUATOR_H_
#define SHEEPDOG_EVALUATOR_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheepdog/corpus.h"
#include "sheepdog/model.h"

namespace sheepdog {

// counts[truth][predicted], indexed by LabelIndex.
struct ConfusionMatrix {
  std::array<std::array<long, 2>, 2> counts{};

  long total() const;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::array<double, 2> per_class_f1{};  // REAL, FAKE
  ConfusionMatrix confusion;
  long n = 0;
};

// F1 of a class whose precision or recall has an empty denominator is 0.
MetricsReport MetricsFromConfusion(const ConfusionMatrix& confusion);
MetricsReport ComputeMetrics(std::span<const Label> truth, std::span<const Label> predicted);

// Argmax of the veracity logits; an exact tie predicts REAL.
Label PredictLabel(const ModelOutputs& outputs);
std::vector<Label> Predict(const DetectorModel& model, const std::vector<NewsArticle>& articles);

// Throws EMPTY_TEST_SET on an empty list, INVALID_ARGUMENT on unlabeled items.
MetricsReport Evaluate(const DetectorModel& model, const std::vector<NewsArticle>& articles);

struct SignificanceResult {
  double statistic = 0.0;  // W+ - W- over the nonzero differences a - b
  double p_value = 1.0;    // two-sided
  int n_pairs = 0;         // nonzero differences
  std::string method;      // "wilcoxon-signed-rank-exact" | "wilcoxon-signed-rank-normal"
};

// Paired two-sided Wilcoxon signed-rank test. Zero differences are dropped
// and tied magnitudes share their mean rank. Exact null distribution for up
// to 25 remaining pairs, tie-corrected normal approximation beyond that.
// Throws TOO_FEW_PAIRS when fewer than 5 pairs are given or all differences
// are zero.
SignificanceResult WilcoxonSignedRank(std::span<const double> a, std::span<const double> b);

struct RobustnessRow {
  std::string set_id;
  MetricsReport metrics;
  double gap = 0.0;  // macro-F1 points lost against the original test set
};

struct RobustnessReport {
  MetricsReport original;
  std::vector<RobustnessRow> sets;
};

RobustnessReport MakeRobustnessReport(const DetectorModel& model,
                                      const std::vector<NewsArticle>& original_test,
                                      const std::map<std::string, std::vector<NewsArticle>>& adversarial);
// Builds the gaps from already computed metrics.
RobustnessReport MakeRobustnessReport(const MetricsReport& original,
                                      const std::map<std::string, MetricsReport>& adversarial);

struct Explanation {
  std::string article_id;
  Label predicted_label = Label::kReal;
  std::string top_attribution;
  std::array<double, 4> attribution_probs{};
  bool tie = false;
};

// Softmax over the attribution logits with first-in-canonical-order argmax.
Explanation ExplainFromOutputs(const std::string& article_id, const ModelOutputs& outputs);
// Throws NO_ATTRIBUTION_HEAD for checkpoints trained without attribution.
Explanation Explain(const DetectorModel& model, const NewsArticle& article);

nlohmann::ordered_json MetricsToJson(const MetricsReport& report);
nlohmann::ordered_json SignificanceToJson(const SignificanceResult& result);
nlohmann::ordered_json RobustnessToJson(const RobustnessReport& report);
nlohmann::ordered_json ExplanationToJson(const Explanation& explanation);
// Aligned columns with metrics in percent.
std::string RobustnessToText(const RobustnessReport& report);

}  // namespace sheepdog

#endif  // SHEEPDOG_EVALUATOR_H_
