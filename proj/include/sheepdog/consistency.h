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

#ifndef SHEEPDOG_CONSISTENCY_H_
#define SHEEPDOG_CONSISTENCY_H_

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheepdog/llm_gateway.h"

namespace sheepdog {

// ORIGINAL_ENTAILS_REFRAMED: the claim comes from the original and is checked
// against the reframing. REFRAMED_ENTAILS_ORIGINAL: the reverse.
enum class EntailDirection { kOriginalEntailsReframed, kReframedEntailsOriginal };
std::string_view EntailDirectionName(EntailDirection direction);

enum class EntailAnswer { kYes, kNo, kUnparseable };
std::string_view EntailAnswerName(EntailAnswer answer);

// First alphabetic token, case-insensitive: "yes" or "no".
EntailAnswer ParseEntailment(std::string_view response);

struct ConsistencyPair {
  std::string article_id;
  std::string original;
  std::string reframed;
};

struct EntailmentRecord {
  std::string article_id;
  EntailDirection direction = EntailDirection::kOriginalEntailsReframed;
  std::string claim;
  EntailAnswer answer = EntailAnswer::kUnparseable;
};

struct ConsistencyResult {
  EntailDirection direction = EntailDirection::kOriginalEntailsReframed;
  // YES / n, with UNPARSEABLE records in n.
  double rate = 0.0;
  long n = 0;
  long yes = 0;
  long no = 0;
  long unparseable = 0;
  std::vector<EntailmentRecord> records;
};

// Throws EMPTY_INPUT on no records.
ConsistencyResult SummarizeEntailment(EntailDirection direction, std::vector<EntailmentRecord> records);
nlohmann::ordered_json ConsistencyToJson(const ConsistencyResult& result);

class ConsistencyChecker {
 public:
  ConsistencyChecker(LlmGateway& gateway, std::string provider_model);

  // Throws EMPTY_CLAIM on a blank response.
  std::string ExtractClaim(std::string_view article_text);
  // Throws EMPTY_CLAIM on a blank claim.
  EntailAnswer CheckEntailment(std::string_view claim, std::string_view article_text);

  // Claim extraction, then entailment, each phase concurrent through the
  // gateway. A blank extracted claim yields an UNPARSEABLE record.
  ConsistencyResult Run(const std::vector<ConsistencyPair>& pairs, EntailDirection direction);

 private:
  CompletionRequest ClaimRequest(std::string_view text) const;
  CompletionRequest EntailRequest(std::string_view claim, std::string_view text) const;

  LlmGateway& gateway_;
  std::string provider_model_;
};

}  // namespace sheepdog

#endif  // SHEEPDOG_CONSISTENCY_H_
