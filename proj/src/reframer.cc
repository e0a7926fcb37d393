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

#include "sheepdog/reframer.h"

#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sheepdog/error.h"
#include "sheepdog/util.h"

namespace sheepdog {

std::string_view ToneSurface(Tone tone) {
  switch (tone) {
    case Tone::kObjectiveProfessional: return "objective and professional";
    case Tone::kNeutral: return "neutral";
    case Tone::kEmotionallyTriggering: return "emotionally triggering";
    case Tone::kSensational: return "sensational";
  }
  return "neutral";
}

StyleClass ToneStyleClass(Tone tone) {
  return tone == Tone::kObjectiveProfessional || tone == Tone::kNeutral ? StyleClass::kReliable
                                                                         : StyleClass::kUnreliable;
}

std::string_view ToneName(Tone tone) {
  switch (tone) {
    case Tone::kObjectiveProfessional: return "objective_professional";
    case Tone::kNeutral: return "neutral";
    case Tone::kEmotionallyTriggering: return "emotionally_triggering";
    case Tone::kSensational: return "sensational";
  }
  return "neutral";
}

Tone ToneFromName(std::string_view name) {
  const std::string lower = ToLowerAscii(TrimWhitespace(name));
  for (Tone t : kAllTones) {
    const std::string_view surface = ToneSurface(t);
    if (lower == ToneName(t) || lower == surface || lower == surface.substr(0, surface.find(' '))) {
      return t;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown tone '" + std::string(name) + "'");
}

std::vector<Tone> ToneSet::all() const {
  std::vector<Tone> out = reliable;
  out.insert(out.end(), unreliable.begin(), unreliable.end());
  return out;
}

ToneSet MakeToneSet(ToneSetName name) {
  using T = Tone;
  switch (name) {
    case ToneSetName::kFull:
      return {name, {T::kObjectiveProfessional, T::kNeutral},
              {T::kEmotionallyTriggering, T::kSensational}};
    case ToneSetName::kR1: return {name, {T::kObjectiveProfessional}, {T::kEmotionallyTriggering}};
    case ToneSetName::kR2: return {name, {T::kObjectiveProfessional}, {T::kSensational}};
    case ToneSetName::kR3: return {name, {T::kNeutral}, {T::kEmotionallyTriggering}};
    case ToneSetName::kR4: return {name, {T::kNeutral}, {T::kSensational}};
  }
  return MakeToneSet(ToneSetName::kFull);
}

std::string_view ToneSetLabel(ToneSetName name) {
  switch (name) {
    case ToneSetName::kFull: return "full";
    case ToneSetName::kR1: return "r1";
    case ToneSetName::kR2: return "r2";
    case ToneSetName::kR3: return "r3";
    case ToneSetName::kR4: return "r4";
  }
  return "full";
}

ToneSet ToneSetFromName(std::string_view name) {
  const std::string lower = ToLowerAscii(name);
  for (ToneSetName n : {ToneSetName::kFull, ToneSetName::kR1, ToneSetName::kR2, ToneSetName::kR3,
                        ToneSetName::kR4}) {
    if (lower == ToneSetLabel(n)) return MakeToneSet(n);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown tone set '" + std::string(name) + "'");
}

void ReframingStore::Add(Reframing reframing) {
  auto key = std::make_pair(reframing.article_id, reframing.tone);
  items_[std::move(key)] = std::move(reframing);
}

const Reframing* ReframingStore::Find(std::string_view article_id, Tone tone) const {
  auto it = items_.find(std::make_pair(std::string(article_id), tone));
  return it == items_.end() ? nullptr : &it->second;
}

bool ReframingStore::HasAll(std::string_view article_id, const ToneSet& tone_set) const {
  for (Tone t : tone_set.all()) {
    if (Find(article_id, t) == nullptr) return false;
  }
  return true;
}

std::size_t ReframingStore::CountFor(std::string_view article_id) const {
  std::size_t n = 0;
  for (Tone t : kAllTones) n += Find(article_id, t) != nullptr ? 1 : 0;
  return n;
}

void ReframingStore::Save(const std::filesystem::path& path) const {
  std::string out;
  for (const auto& [key, r] : items_) {
    nlohmann::ordered_json j;
    j["article_id"] = r.article_id;
    j["tone"] = std::string(ToneName(r.tone));
    j["text"] = r.text;
    out += j.dump() + "\n";
  }
  WriteFileAtomic(path, out);
}

ReframingStore ReframingStore::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "reframings file " + path.string());
  ReframingStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimWhitespace(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Reframing r;
      r.article_id = j.at("article_id").get<std::string>();
      r.tone = ToneFromName(j.at("tone").get<std::string>());
      r.text = j.at("text").get<std::string>();
      store.Add(std::move(r));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

Reframer::Reframer(LlmGateway& gateway, std::string provider_model)
    : gateway_(gateway), provider_model_(std::move(provider_model)) {}

CompletionRequest Reframer::Request(const NewsArticle& article, Tone tone) const {
  if (TrimWhitespace(article.text).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "article '" + article.id + "' has empty text");
  }
  CompletionRequest request =
      MakeRequest(TemplateId::kReframeTone,
                  {{"tone", std::string(ToneSurface(tone))}, {"article", article.text}},
                  provider_model_);
  request.tags["article_id"] = article.id;
  request.tags["tone"] = std::string(ToneName(tone));
  return request;
}

Reframing Reframer::Finish(const NewsArticle& article, Tone tone,
                           const CompletionResponse& response) {
  Reframing r;
  r.article_id = article.id;
  r.tone = tone;
  r.origin = response.provider_metadata.count("cache_key") != 0
                 ? response.provider_metadata.at("cache_key")
                 : std::string();
  if (TrimWhitespace(response.text).empty()) {
    spdlog::warn("{}: empty {} reframing for article '{}'; using the original text",
                 ErrorCodeName(ErrorCode::kEmptyReframing), ToneName(tone), article.id);
    r.text = article.text;
    r.fallback = true;
    ++fallback_count_;
  } else {
    r.text = response.text;
  }
  return r;
}

Reframing Reframer::Reframe(const NewsArticle& article, Tone tone) {
  return Finish(article, tone, gateway_.Complete(Request(article, tone)));
}

ReframingStore Reframer::Pregenerate(const std::vector<NewsArticle>& articles,
                                     const ToneSet& tone_set) {
  std::vector<CompletionRequest> requests;
  std::vector<std::pair<const NewsArticle*, Tone>> owners;
  for (const NewsArticle& a : articles) {
    for (Tone t : tone_set.all()) {
      requests.push_back(Request(a, t));
      owners.emplace_back(&a, t);
    }
  }
  std::vector<BatchResult> results = gateway_.CompleteAll(requests);
  ReframingStore store;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].error) {
      if (!first_error) first_error = results[i].error;
      continue;
    }
    store.Add(Finish(*owners[i].first, owners[i].second, *results[i].response));
  }
  if (first_error) std::rethrow_exception(first_error);
  return store;
}

ReframingPair SampleTrainingPair(const ReframingStore& store, std::string_view article_id,
                                 const ToneSet& tone_set, Rng& rng) {
  if (tone_set.reliable.empty() || tone_set.unreliable.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "tone set needs reliable and unreliable tones");
  }
  for (Tone t : tone_set.all()) {
    if (store.Find(article_id, t) == nullptr) {
      throw Error(ErrorCode::kMissingReframing, "article '" + std::string(article_id) +
                                                    "' has no " + std::string(ToneName(t)) +
                                                    " reframing");
    }
  }
  const Tone reliable = tone_set.reliable[rng.uniform_index(tone_set.reliable.size())];
  const Tone unreliable = tone_set.unreliable[rng.uniform_index(tone_set.unreliable.size())];
  return {store.Find(article_id, reliable), store.Find(article_id, unreliable)};
}

}  // namespace sheepdog
