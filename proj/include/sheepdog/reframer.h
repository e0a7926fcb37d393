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

#ifndef SHEEPDOG_REFRAMER_H_
#define SHEEPDOG_REFRAMER_H_

#include <array>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheepdog/corpus.h"
#include "sheepdog/llm_gateway.h"
#include "sheepdog/rng.h"

namespace sheepdog {

enum class Tone { kObjectiveProfessional, kNeutral, kEmotionallyTriggering, kSensational };
enum class StyleClass { kReliable, kUnreliable };

inline constexpr std::array<Tone, 4> kAllTones = {
    Tone::kObjectiveProfessional, Tone::kNeutral, Tone::kEmotionallyTriggering,
    Tone::kSensational};

// Exact adjective phrase used in the reframing prompt.
std::string_view ToneSurface(Tone tone);
StyleClass ToneStyleClass(Tone tone);
// Identifier used in files and on the command line ("objective_professional").
std::string_view ToneName(Tone tone);
// Accepts the identifier, the surface phrase, or the first word ("objective").
Tone ToneFromName(std::string_view name);

enum class ToneSetName { kFull, kR1, kR2, kR3, kR4 };

struct ToneSet {
  ToneSetName name = ToneSetName::kFull;
  std::vector<Tone> reliable;
  std::vector<Tone> unreliable;

  std::vector<Tone> all() const;
};

ToneSet MakeToneSet(ToneSetName name);
// "full", "r1" .. "r4" (case-insensitive).
ToneSet ToneSetFromName(std::string_view name);
std::string_view ToneSetLabel(ToneSetName name);

struct Reframing {
  std::string article_id;
  Tone tone = Tone::kNeutral;
  std::string text;
  std::string origin;  // cache key of the completion
  bool fallback = false;
};

// Reframings indexed by (article id, tone).
class ReframingStore {
 public:
  void Add(Reframing reframing);
  const Reframing* Find(std::string_view article_id, Tone tone) const;
  bool HasAll(std::string_view article_id, const ToneSet& tone_set) const;
  std::size_t CountFor(std::string_view article_id) const;
  std::size_t size() const { return items_.size(); }
  const std::map<std::pair<std::string, Tone>, Reframing>& items() const { return items_; }

  // JSONL rows {"article_id","tone","text"} sorted by (article id, tone).
  void Save(const std::filesystem::path& path) const;
  static ReframingStore Load(const std::filesystem::path& path);

 private:
  std::map<std::pair<std::string, Tone>, Reframing> items_;
};

class Reframer {
 public:
  Reframer(LlmGateway& gateway, std::string provider_model);

  CompletionRequest Request(const NewsArticle& article, Tone tone) const;

  // Renders the tone prompt and completes it. An empty or blank response
  // falls back to the original text with a warning.
  Reframing Reframe(const NewsArticle& article, Tone tone);

  // Generates every tone of `tone_set` for every article, dispatching through
  // the gateway concurrently. Throws the first failure after all requests ran.
  ReframingStore Pregenerate(const std::vector<NewsArticle>& articles, const ToneSet& tone_set);

  std::size_t fallback_count() const { return fallback_count_; }

 private:
  Reframing Finish(const NewsArticle& article, Tone tone, const CompletionResponse& response);

  LlmGateway& gateway_;
  std::string provider_model_;
  std::atomic<std::size_t> fallback_count_{0};
};

struct ReframingPair {
  const Reframing* reliable;
  const Reframing* unreliable;
};

// One uniformly drawn reliable-style and one unreliable-style reframing of
// the article. Draws the reliable tone first, then the unreliable one.
// Throws MISSING_REFRAMING when any tone of the set is absent.
ReframingPair SampleTrainingPair(const ReframingStore& store, std::string_view article_id,
                                 const ToneSet& tone_set, Rng& rng);

}  // namespace sheepdog

#endif  // SHEEPDOG_REFRAMER_H_
