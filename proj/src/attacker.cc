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

#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sheepdog/error.h"
#include "sheepdog/util.h"

namespace sheepdog {

const std::array<AdversarialSetSpec, 4>& CanonicalAdversarialSets() {
  static const std::array<AdversarialSetSpec, 4> kSets = {{
      {"A", "National Enquirer", "CNN"},
      {"B", "National Enquirer", "The New York Times"},
      {"C", "The Sun", "CNN"},
      {"D", "The Sun", "The New York Times"},
  }};
  return kSets;
}

const AdversarialSetSpec& CanonicalAdversarialSet(std::string_view set_id) {
  for (const auto& spec : CanonicalAdversarialSets()) {
    if (spec.set_id == set_id) return spec;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown adversarial set '" + std::string(set_id) + "'");
}

Attacker::Attacker(LlmGateway& gateway, std::string provider_model)
    : gateway_(gateway), provider_model_(std::move(provider_model)) {}

CompletionRequest Attacker::Request(const NewsArticle& article, std::string_view publisher,
                                    std::string_view set_id) const {
  if (!article.labeled()) {
    throw Error(ErrorCode::kInvalidArgument, "article '" + article.id + "' is unlabeled");
  }
  CompletionRequest request = MakeRequest(
      TemplateId::kAttackRestyle,
      {{"publisher", std::string(publisher)}, {"article", article.text}}, provider_model_);
  request.tags["article_id"] = article.id;
  request.tags["label"] = std::string(LabelName(article.label));
  request.tags["publisher"] = std::string(publisher);
  if (!set_id.empty()) request.tags["set_id"] = std::string(set_id);
  return request;
}

AdversarialArticle Attacker::Finish(const NewsArticle& article, std::string_view publisher,
                                    std::string_view set_id, const CompletionResponse& response) {
  AdversarialArticle out;
  out.article_id = article.id;
  out.set_id = std::string(set_id);
  out.label = article.label;
  out.publisher = std::string(publisher);
  if (TrimWhitespace(response.text).empty()) {
    spdlog::warn("empty restyling of article '{}' as {}; keeping the original text", article.id,
                 publisher);
    out.text = article.text;
    out.fallback = true;
    ++fallback_count_;
  } else {
    out.text = response.text;
  }
  return out;
}

AdversarialArticle Attacker::Restyle(const NewsArticle& article, std::string_view publisher) {
  return Finish(article, publisher, {}, gateway_.Complete(Request(article, publisher)));
}

std::vector<AdversarialArticle> Attacker::BuildSet(const std::vector<NewsArticle>& test_articles,
                                                   const AdversarialSetSpec& spec,
                                                   const AttackOptions& options) {
  std::vector<CompletionRequest> requests;
  std::vector<std::string> publishers;
  for (const NewsArticle& a : test_articles) {
    if (!options.allow_train && options.train_ids.count(a.id) != 0) {
      throw Error(ErrorCode::kTrainIdsRefused,
                  "article '" + a.id + "' belongs to the training split (use --allow-train)");
    }
    const std::string& publisher = a.label == Label::kReal ? spec.real_publisher : spec.fake_publisher;
    requests.push_back(Request(a, publisher, spec.set_id));
    publishers.push_back(publisher);
  }
  const std::vector<BatchResult> results = gateway_.CompleteAll(requests);
  std::vector<AdversarialArticle> out;
  out.reserve(results.size());
  std::vector<std::string> failures;
  ErrorCode failure_code = ErrorCode::kProviderError;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].error) {
      try {
        std::rethrow_exception(results[i].error);
      } catch (const Error& e) {
        failure_code = e.code();
        failures.push_back(test_articles[i].id + " (" + e.what() + ")");
      } catch (const std::exception& e) {
        failures.push_back(test_articles[i].id + " (" + e.what() + ")");
      }
      continue;
    }
    out.push_back(Finish(test_articles[i], publishers[i], spec.set_id, *results[i].response));
  }
  if (!failures.empty()) {
    std::string msg = "set " + spec.set_id + ": " + std::to_string(failures.size()) +
                      " article(s) failed: ";
    for (std::size_t i = 0; i < failures.size(); ++i) msg += (i ? "; " : "") + failures[i];
    throw Error(failure_code, msg);
  }
  return out;
}

void SaveAdversarialSet(const std::vector<AdversarialArticle>& articles,
                        const std::filesystem::path& path) {
  std::string out;
  for (const AdversarialArticle& a : articles) {
    nlohmann::ordered_json j;
    j["id"] = a.article_id;
    j["text"] = a.text;
    j["label"] = std::string(LabelName(a.label));
    j["timestamp"] = nullptr;
    j["set_id"] = a.set_id;
    out += j.dump() + "\n";
  }
  WriteFileAtomic(path, out);
}

std::vector<AdversarialArticle> LoadAdversarialSet(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "adversarial set " + path.string());
  std::vector<AdversarialArticle> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimWhitespace(line).empty()) continue;
    try {
      const NewsArticle base = ArticleFromJsonLine(line);
      const auto j = nlohmann::json::parse(line);
      AdversarialArticle a;
      a.article_id = base.id;
      a.text = base.text;
      a.label = base.label;
      a.set_id = j.at("set_id").get<std::string>();
      out.push_back(std::move(a));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<NewsArticle> AsArticles(const std::vector<AdversarialArticle>& articles) {
  std::vector<NewsArticle> out;
  out.reserve(articles.size());
  for (const auto& a : articles) out.push_back({a.article_id, a.text, a.label, std::nullopt});
  return out;
}

}  // namespace sheepdog
