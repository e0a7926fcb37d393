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

#ifndef SHEEPDOG_ATTRIBUTOR_H_
#define SHEEPDOG_ATTRIBUTOR_H_

#include <array>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "sheepdog/corpus.h"
#include "sheepdog/llm_gateway.h"
#include "sheepdog/reframer.h"

namespace sheepdog {

inline constexpr std::size_t kNumRationales = 4;

// Canonical rationale order: the enumeration order of the attribution prompt.
inline constexpr std::array<std::string_view, kNumRationales> kCanonicalRationales = {
    "Lack of credible sources",
    "False or misleading information",
    "Biased opinion",
    "Inconsistencies with reputable sources",
};

struct RationaleSet {
  std::array<std::string, kNumRationales> rationales;

  static const RationaleSet& Canonical();
};

// Binary pseudo-label; bit i corresponds to rationales[i].
struct AttributionVector {
  std::array<int, kNumRationales> bits{};

  bool all_zero() const;
  bool operator==(const AttributionVector&) const = default;
};

struct ParsedAttribution {
  AttributionVector vector;
  // True when the response named no rationale and was not "No problems".
  bool unparseable = false;
};

// Case-insensitive phrase matching; order, whitespace and trailing
// punctuation in the response do not matter.
ParsedAttribution ParseAttributions(std::string_view response,
                                    const RationaleSet& rationale_set = RationaleSet::Canonical());

// Comma-separated rationale list for the set bits, or "No problems".
std::string FormatAttributions(const AttributionVector& vector,
                               const RationaleSet& rationale_set = RationaleSet::Canonical());

enum class Variant { kOriginal, kReliable, kUnreliable };
std::string_view VariantName(Variant variant);  // "orig" | "reliable" | "unreliable"
Variant VariantFromName(std::string_view name);

struct PseudoLabel {
  std::string article_id;
  Variant variant = Variant::kOriginal;
  std::optional<Tone> tone;  // set for reframing variants
  AttributionVector bits;
  std::optional<std::string> raw_response;  // absent for REAL articles
  bool unparseable = false;
};

class PseudoLabelStore {
 public:
  void Add(PseudoLabel label);
  const PseudoLabel* Find(std::string_view article_id, Variant variant,
                          std::optional<Tone> tone = std::nullopt) const;
  std::size_t size() const { return items_.size(); }
  std::vector<const PseudoLabel*> All() const;

  // JSONL rows {"article_id","variant","tone","bits","raw_response"}.
  void Save(const std::filesystem::path& path) const;
  static PseudoLabelStore Load(const std::filesystem::path& path);

 private:
  using Key = std::tuple<std::string, Variant, int>;
  static Key MakeKey(std::string_view article_id, Variant variant, std::optional<Tone> tone);
  std::map<Key, PseudoLabel> items_;
};

struct AttributeOptions {
  // Copy the original article's labels to its reframings instead of
  // querying the LLM for each reframing.
  bool reuse_original_attributions = false;
};

class Attributor {
 public:
  Attributor(LlmGateway& gateway, std::string provider_model);

  CompletionRequest Request(std::string_view article_text) const;

  // Raw LLM response to the attribution prompt (temperature 0).
  std::string Elicit(std::string_view article_text);

  // REAL articles get all-zero vectors without any LLM call; FAKE articles
  // are elicited and parsed text by text.
  std::vector<AttributionVector> PseudoLabels(const NewsArticle& article,
                                              const std::vector<std::string>& texts);

  // Labels every training article and, when `reframings` is given, each of
  // its reframings for the tones in `tone_set`.
  PseudoLabelStore LabelTrainingSet(const std::vector<NewsArticle>& articles,
                                    const ReframingStore* reframings, const ToneSet& tone_set,
                                    const AttributeOptions& options = {});

  std::size_t unparseable_count() const { return unparseable_count_; }

 private:
  LlmGateway& gateway_;
  std::string provider_model_;
  std::atomic<std::size_t> unparseable_count_{0};
};

}  // namespace sheepdog

#endif  // SHEEPDOG_ATTRIBUTOR_H_
