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

#ifndef SHEEPDOG_ATTACKER_H_
#define SHEEPDOG_ATTACKER_H_

#include <array>
#include <atomic>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sheepdog/corpus.h"
#include "sheepdog/llm_gateway.h"

namespace sheepdog {

// Publisher pair for one adversarial test set: real news is restyled as the
// tabloid, fake news as the mainstream outlet.
struct AdversarialSetSpec {
  std::string set_id;
  std::string real_publisher;
  std::string fake_publisher;
};

// Sets A-D: {National Enquirer, The Sun} x {CNN, The New York Times}.
const std::array<AdversarialSetSpec, 4>& CanonicalAdversarialSets();
const AdversarialSetSpec& CanonicalAdversarialSet(std::string_view set_id);

struct AdversarialArticle {
  std::string article_id;
  std::string set_id;
  std::string text;
  Label label = Label::kUnlabeled;  // always the source article's label
  std::string publisher;
  bool fallback = false;
};

struct AttackOptions {
  // Ids the attacker must not touch unless allow_train is set.
  std::set<std::string> train_ids;
  bool allow_train = false;
};

class Attacker {
 public:
  Attacker(LlmGateway& gateway, std::string provider_model);

  CompletionRequest Request(const NewsArticle& article, std::string_view publisher,
                            std::string_view set_id = {}) const;

  // Restyles one labeled article; an empty response keeps the original text.
  AdversarialArticle Restyle(const NewsArticle& article, std::string_view publisher);

  // Restyles every article with the publisher its label routes to. All
  // articles are attempted; failures are collected into one error.
  std::vector<AdversarialArticle> BuildSet(const std::vector<NewsArticle>& test_articles,
                                           const AdversarialSetSpec& spec,
                                           const AttackOptions& options = {});

  std::size_t fallback_count() const { return fallback_count_; }

 private:
  AdversarialArticle Finish(const NewsArticle& article, std::string_view publisher,
                            std::string_view set_id, const CompletionResponse& response);

  LlmGateway& gateway_;
  std::string provider_model_;
  std::atomic<std::size_t> fallback_count_{0};
};

// Corpus JSONL format plus "set_id".
void SaveAdversarialSet(const std::vector<AdversarialArticle>& articles,
                        const std::filesystem::path& path);
std::vector<AdversarialArticle> LoadAdversarialSet(const std::filesystem::path& path);

// View of an adversarial set as plain labeled articles (same ids).
std::vector<NewsArticle> AsArticles(const std::vector<AdversarialArticle>& articles);

}  // namespace sheepdog

#endif  // SHEEPDOG_ATTACKER_H_
