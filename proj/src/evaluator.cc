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

#include "sheepdog/evaluator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sheepdog/attributor.h"
#include "sheepdog/error.h"
#include "sheepdog/losses.h"

namespace sheepdog {
namespace {

using json = nlohmann::ordered_json;

constexpr int kExactMaxPairs = 25;
constexpr int kMinPairs = 5;

double SafeDiv(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
  return buf;
}

}  // namespace

long ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

MetricsReport MetricsFromConfusion(const ConfusionMatrix& confusion) {
  MetricsReport r;
  r.confusion = confusion;
  r.n = confusion.total();
  const auto& c = confusion.counts;
  r.accuracy = SafeDiv(static_cast<double>(c[0][0] + c[1][1]), static_cast<double>(r.n));
  for (int k = 0; k < 2; ++k) {
    const double tp = static_cast<double>(c[k][k]);
    const double fn = static_cast<double>(c[k][1 - k]);
    const double fp = static_cast<double>(c[1 - k][k]);
    // 2PR / (P + R) in count form; 0 whenever precision or recall is undefined.
    r.per_class_f1[k] = SafeDiv(2.0 * tp, 2.0 * tp + fp + fn);
  }
  r.macro_f1 = (r.per_class_f1[0] + r.per_class_f1[1]) / 2.0;
  return r;
}

MetricsReport ComputeMetrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kInvalidArgument, "truth and prediction counts differ");
  }
  ConfusionMatrix m;
  for (size_t i = 0; i < truth.size(); ++i) {
    m.counts[LabelIndex(truth[i])][LabelIndex(predicted[i])] += 1;
  }
  return MetricsFromConfusion(m);
}

Label PredictLabel(const ModelOutputs& outputs) {
  return outputs.y_logits(1) > outputs.y_logits(0) ? Label::kFake : Label::kReal;
}

std::vector<Label> Predict(const DetectorModel& model, const std::vector<NewsArticle>& articles) {
  std::vector<Label> out;
  out.reserve(articles.size());
  for (const auto& a : articles) out.push_back(PredictLabel(model.Forward(a.text)));
  return out;
}

MetricsReport Evaluate(const DetectorModel& model, const std::vector<NewsArticle>& articles) {
  if (articles.empty()) throw Error(ErrorCode::kEmptyTestSet, "no articles to evaluate");
  std::vector<Label> truth;
  for (const auto& a : articles) {
    if (!a.labeled()) throw Error(ErrorCode::kInvalidArgument, "test article '" + a.id + "' has no label");
    truth.push_back(a.label);
  }
  const std::vector<Label> predicted = Predict(model, articles);
  return ComputeMetrics(truth, predicted);
}

SignificanceResult WilcoxonSignedRank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "paired samples differ in length");
  if (a.size() < static_cast<size_t>(kMinPairs)) {
    throw Error(ErrorCode::kTooFewPairs, "need at least " + std::to_string(kMinPairs) + " pairs, got " +
                                             std::to_string(a.size()));
  }
  std::vector<double> diffs;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw Error(ErrorCode::kTooFewPairs, "all paired differences are zero");
  const int n = static_cast<int>(diffs.size());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
  // Doubled mid-ranks keep tied ranks integral.
  std::vector<int> rank2(n);
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const int doubled = (i + 1) + (j + 1);
    for (int k = i; k <= j; ++k) rank2[order[k]] = doubled;
    i = j + 1;
  }
  long total2 = 0, plus2 = 0;
  for (int i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (diffs[i] > 0) plus2 += rank2[i];
  }

  SignificanceResult r;
  r.n_pairs = n;
  r.statistic = static_cast<double>(2 * plus2 - total2) / 2.0;
  const long observed = std::abs(2 * plus2 - total2);
  if (n <= kExactMaxPairs) {
    r.method = "wilcoxon-signed-rank-exact";
    std::vector<double> ways(static_cast<size_t>(total2) + 1, 0.0);
    ways[0] = 1.0;
    long reach = 0;
    for (int i = 0; i < n; ++i) {
      reach += rank2[i];
      for (long s = reach; s >= rank2[i]; --s) ways[s] += ways[s - rank2[i]];
    }
    double extreme = 0.0;
    for (long s = 0; s <= total2; ++s) {
      if (std::abs(2 * s - total2) >= observed) extreme += ways[s];
    }
    r.p_value = std::min(1.0, extreme / std::ldexp(1.0, n));
  } else {
    r.method = "wilcoxon-signed-rank-normal";
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (rank2[i] / 2.0) * (rank2[i] / 2.0);
    var /= 4.0;
    const double z = (static_cast<double>(observed) / 4.0) / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }
  return r;
}

RobustnessReport MakeRobustnessReport(const MetricsReport& original,
                                      const std::map<std::string, MetricsReport>& adversarial) {
  RobustnessReport r;
  r.original = original;
  for (const auto& [id, m] : adversarial) {
    r.sets.push_back({id, m, (original.macro_f1 - m.macro_f1) * 100.0});
  }
  return r;
}

RobustnessReport MakeRobustnessReport(const DetectorModel& model,
                                      const std::vector<NewsArticle>& original_test,
                                      const std::map<std::string, std::vector<NewsArticle>>& adversarial) {
  std::map<std::string, MetricsReport> metrics;
  for (const auto& [id, articles] : adversarial) metrics[id] = Evaluate(model, articles);
  return MakeRobustnessReport(Evaluate(model, original_test), metrics);
}

Explanation ExplainFromOutputs(const std::string& article_id, const ModelOutputs& outputs) {
  Explanation e;
  e.article_id = article_id;
  e.predicted_label = PredictLabel(outputs);
  const Eigen::VectorXd probs = Softmax(outputs.s_logits);
  size_t best = 0;
  for (size_t k = 0; k < kNumRationales; ++k) {
    e.attribution_probs[k] = probs(static_cast<Eigen::Index>(k));
    if (outputs.s_logits(static_cast<Eigen::Index>(k)) > outputs.s_logits(static_cast<Eigen::Index>(best))) best = k;
  }
  for (size_t k = 0; k < kNumRationales; ++k) {
    if (k != best && outputs.s_logits(static_cast<Eigen::Index>(k)) == outputs.s_logits(static_cast<Eigen::Index>(best))) {
      e.tie = true;
    }
  }
  e.top_attribution = std::string(kCanonicalRationales[best]);
  return e;
}

Explanation Explain(const DetectorModel& model, const NewsArticle& article) {
  if (!model.info().attribution_trained) {
    throw Error(ErrorCode::kNoAttributionHead, "checkpoint was trained without attribution");
  }
  return ExplainFromOutputs(article.id, model.Forward(article.text));
}

json MetricsToJson(const MetricsReport& r) {
  json j;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["per_class_f1"] = {{"REAL", r.per_class_f1[0]}, {"FAKE", r.per_class_f1[1]}};
  j["confusion"] = {{r.confusion.counts[0][0], r.confusion.counts[0][1]},
                    {r.confusion.counts[1][0], r.confusion.counts[1][1]}};
  return j;
}

json SignificanceToJson(const SignificanceResult& r) {
  return {{"method", r.method}, {"statistic", r.statistic}, {"p_value", r.p_value}, {"n_pairs", r.n_pairs}};
}

json RobustnessToJson(const RobustnessReport& r) {
  json j;
  j["original"] = MetricsToJson(r.original);
  json sets = json::object();
  for (const auto& row : r.sets) {
    json s = MetricsToJson(row.metrics);
    s["gap"] = row.gap;
    sets[row.set_id] = s;
  }
  j["adversarial"] = sets;
  return j;
}

json ExplanationToJson(const Explanation& e) {
  json probs = json::object();
  for (size_t k = 0; k < kNumRationales; ++k) probs[std::string(kCanonicalRationales[k])] = e.attribution_probs[k];
  return {{"article_id", e.article_id},
          {"predicted_label", LabelName(e.predicted_label)},
          {"top_attribution", e.top_attribution},
          {"tie", e.tie},
          {"attribution_probs", probs}};
}

std::string RobustnessToText(const RobustnessReport& r) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "%-10s %6s %9s %9s %8s\n", "set", "n", "accuracy", "macro_f1", "gap");
  out += line;
  std::snprintf(line, sizeof(line), "%-10s %6ld %9s %9s %8s\n", "original", r.original.n,
                Percent(r.original.accuracy).c_str(), Percent(r.original.macro_f1).c_str(), "-");
  out += line;
  for (const auto& row : r.sets) {
    char gap[32];
    std::snprintf(gap, sizeof(gap), "%.2f", row.gap);
    std::snprintf(line, sizeof(line), "%-10s %6ld %9s %9s %8s\n", row.set_id.c_str(), row.metrics.n,
                  Percent(row.metrics.accuracy).c_str(), Percent(row.metrics.macro_f1).c_str(), gap);
    out += line;
  }
  return out;
}

}  // namespace sheepdog
