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

#include <spdlog/spdlog.h>

#include "sheepdog/error.h"
#include "sheepdog/prompts.h"
#include "sheepdog/util.h"

namespace sheepdog {
namespace {

bool IsAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

std::string_view EntailDirectionName(EntailDirection direction) {
  return direction == EntailDirection::kOriginalEntailsReframed ? "ORIGINAL_ENTAILS_REFRAMED"
                                                                : "REFRAMED_ENTAILS_ORIGINAL";
}

std::string_view EntailAnswerName(EntailAnswer answer) {
  switch (answer) {
    case EntailAnswer::kYes:
      return "YES";
    case EntailAnswer::kNo:
      return "NO";
    case EntailAnswer::kUnparseable:
      return "UNPARSEABLE";
  }
  return "UNPARSEABLE";
}

EntailAnswer ParseEntailment(std::string_view response) {
  size_t i = 0;
  while (i < response.size() && !IsAlpha(response[i])) ++i;
  size_t j = i;
  while (j < response.size() && IsAlpha(response[j])) ++j;
  const std::string token = ToLowerAscii(response.substr(i, j - i));
  if (token == "yes") return EntailAnswer::kYes;
  if (token == "no") return EntailAnswer::kNo;
  return EntailAnswer::kUnparseable;
}

ConsistencyResult SummarizeEntailment(EntailDirection direction, std::vector<EntailmentRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no article pairs to check");
  ConsistencyResult r;
  r.direction = direction;
  r.n = static_cast<long>(records.size());
  for (const auto& rec : records) {
    if (rec.answer == EntailAnswer::kYes) ++r.yes;
    if (rec.answer == EntailAnswer::kNo) ++r.no;
    if (rec.answer == EntailAnswer::kUnparseable) ++r.unparseable;
  }
  r.rate = static_cast<double>(r.yes) / static_cast<double>(r.n);
  r.records = std::move(records);
  return r;
}

nlohmann::ordered_json ConsistencyToJson(const ConsistencyResult& r) {
  nlohmann::ordered_json j;
  j["direction"] = EntailDirectionName(r.direction);
  j["rate"] = r.rate;
  j["n"] = r.n;
  j["yes"] = r.yes;
  j["no"] = r.no;
  j["unparseable_count"] = r.unparseable;
  return j;
}

ConsistencyChecker::ConsistencyChecker(LlmGateway& gateway, std::string provider_model)
    : gateway_(gateway), provider_model_(std::move(provider_model)) {}

CompletionRequest ConsistencyChecker::ClaimRequest(std::string_view text) const {
  return MakeRequest(TemplateId::kClaimExtract, Slots{{"article", std::string(text)}}, provider_model_);
}

CompletionRequest ConsistencyChecker::EntailRequest(std::string_view claim, std::string_view text) const {
  return MakeRequest(TemplateId::kClaimEntail, Slots{{"claim", std::string(claim)}, {"article", std::string(text)}},
                     provider_model_);
}

std::string ConsistencyChecker::ExtractClaim(std::string_view article_text) {
  std::string claim = gateway_.Complete(ClaimRequest(article_text)).text;
  if (TrimWhitespace(claim).empty()) throw Error(ErrorCode::kEmptyClaim, "claim extraction returned nothing");
  return claim;
}

EntailAnswer ConsistencyChecker::CheckEntailment(std::string_view claim, std::string_view article_text) {
  if (TrimWhitespace(claim).empty()) throw Error(ErrorCode::kEmptyClaim, "cannot check an empty claim");
  return ParseEntailment(gateway_.Complete(EntailRequest(claim, article_text)).text);
}

ConsistencyResult ConsistencyChecker::Run(const std::vector<ConsistencyPair>& pairs, EntailDirection direction) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no article pairs to check");
  const bool from_original = direction == EntailDirection::kOriginalEntailsReframed;

  std::vector<CompletionRequest> claim_requests;
  for (const auto& p : pairs) {
    CompletionRequest r = ClaimRequest(from_original ? p.original : p.reframed);
    r.tags["article_id"] = p.article_id;
    claim_requests.push_back(std::move(r));
  }
  std::vector<BatchResult> claims = gateway_.CompleteAll(claim_requests);

  std::vector<EntailmentRecord> records(pairs.size());
  std::vector<CompletionRequest> entail_requests;
  std::vector<size_t> entail_index;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (claims[i].error) std::rethrow_exception(claims[i].error);
    records[i].article_id = pairs[i].article_id;
    records[i].direction = direction;
    records[i].claim = claims[i].response->text;
    if (TrimWhitespace(records[i].claim).empty()) {
      spdlog::warn("empty claim for article {}; counted as unparseable", pairs[i].article_id);
      continue;
    }
    CompletionRequest r = EntailRequest(records[i].claim, from_original ? pairs[i].reframed : pairs[i].original);
    r.tags["article_id"] = pairs[i].article_id;
    entail_requests.push_back(std::move(r));
    entail_index.push_back(i);
  }
  std::vector<BatchResult> answers = gateway_.CompleteAll(entail_requests);
  for (size_t k = 0; k < answers.size(); ++k) {
    if (answers[k].error) std::rethrow_exception(answers[k].error);
    records[entail_index[k]].answer = ParseEntailment(answers[k].response->text);
  }
  return SummarizeEntailment(direction, std::move(records));
}

}  // namespace sheepdog
