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

#include "sheepdog/attributor.h"

#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sheepdog/error.h"
#include "sheepdog/util.h"

namespace sheepdog {

const RationaleSet& RationaleSet::Canonical() {
  static const RationaleSet kSet = [] {
    RationaleSet s;
    for (std::size_t i = 0; i < kNumRationales; ++i) s.rationales[i] = kCanonicalRationales[i];
    return s;
  }();
  return kSet;
}

bool AttributionVector::all_zero() const {
  for (int b : bits) {
    if (b != 0) return false;
  }
  return true;
}

ParsedAttribution ParseAttributions(std::string_view response, const RationaleSet& rationale_set) {
  ParsedAttribution parsed;
  const std::string folded = ToLowerAscii(response);
  bool any = false;
  for (std::size_t i = 0; i < kNumRationales; ++i) {
    if (folded.find(ToLowerAscii(rationale_set.rationales[i])) != std::string::npos) {
      parsed.vector.bits[i] = 1;
      any = true;
    }
  }
  if (any) return parsed;
  std::string_view core = TrimWhitespace(folded);
  while (!core.empty() && core.back() == '.') {
    core.remove_suffix(1);
    core = TrimWhitespace(core);
  }
  parsed.unparseable = core != "no problems";
  return parsed;
}

std::string FormatAttributions(const AttributionVector& vector, const RationaleSet& rationale_set) {
  std::string out;
  for (std::size_t i = 0; i < kNumRationales; ++i) {
    if (vector.bits[i] == 0) continue;
    if (!out.empty()) out += ", ";
    out += rationale_set.rationales[i];
  }
  return out.empty() ? "No problems" : out;
}

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kOriginal: return "orig";
    case Variant::kReliable: return "reliable";
    case Variant::kUnreliable: return "unreliable";
  }
  return "orig";
}

Variant VariantFromName(std::string_view name) {
  if (name == "orig") return Variant::kOriginal;
  if (name == "reliable") return Variant::kReliable;
  if (name == "unreliable") return Variant::kUnreliable;
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

PseudoLabelStore::Key PseudoLabelStore::MakeKey(std::string_view article_id, Variant variant,
                                                std::optional<Tone> tone) {
  return {std::string(article_id), variant, tone ? static_cast<int>(*tone) : -1};
}

void PseudoLabelStore::Add(PseudoLabel label) {
  Key key = MakeKey(label.article_id, label.variant, label.tone);
  items_[std::move(key)] = std::move(label);
}

const PseudoLabel* PseudoLabelStore::Find(std::string_view article_id, Variant variant,
                                          std::optional<Tone> tone) const {
  auto it = items_.find(MakeKey(article_id, variant, tone));
  return it == items_.end() ? nullptr : &it->second;
}

std::vector<const PseudoLabel*> PseudoLabelStore::All() const {
  std::vector<const PseudoLabel*> out;
  out.reserve(items_.size());
  for (const auto& [key, label] : items_) out.push_back(&label);
  return out;
}

void PseudoLabelStore::Save(const std::filesystem::path& path) const {
  std::string out;
  for (const auto& [key, label] : items_) {
    nlohmann::ordered_json j;
    j["article_id"] = label.article_id;
    j["variant"] = std::string(VariantName(label.variant));
    if (label.tone) {
      j["tone"] = std::string(ToneName(*label.tone));
    } else {
      j["tone"] = nullptr;
    }
    j["bits"] = label.bits.bits;
    if (label.raw_response) {
      j["raw_response"] = *label.raw_response;
    } else {
      j["raw_response"] = nullptr;
    }
    out += j.dump() + "\n";
  }
  WriteFileAtomic(path, out);
}

PseudoLabelStore PseudoLabelStore::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "pseudo-label file " + path.string());
  PseudoLabelStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimWhitespace(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PseudoLabel label;
      label.article_id = j.at("article_id").get<std::string>();
      label.variant = VariantFromName(j.at("variant").get<std::string>());
      if (j.contains("tone") && !j["tone"].is_null()) {
        label.tone = ToneFromName(j["tone"].get<std::string>());
      }
      const auto bits = j.at("bits").get<std::vector<int>>();
      if (bits.size() != kNumRationales) throw std::invalid_argument("bits must have 4 entries");
      for (std::size_t i = 0; i < kNumRationales; ++i) {
        if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("bits must be 0 or 1");
        label.bits.bits[i] = bits[i];
      }
      if (j.contains("raw_response") && !j["raw_response"].is_null()) {
        label.raw_response = j["raw_response"].get<std::string>();
        label.unparseable = ParseAttributions(*label.raw_response).unparseable;
      }
      store.Add(std::move(label));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

Attributor::Attributor(LlmGateway& gateway, std::string provider_model)
    : gateway_(gateway), provider_model_(std::move(provider_model)) {}

CompletionRequest Attributor::Request(std::string_view article_text) const {
  if (TrimWhitespace(article_text).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "attribution requires non-empty article text");
  }
  return MakeRequest(TemplateId::kAttribution, {{"article", std::string(article_text)}},
                     provider_model_);
}

std::string Attributor::Elicit(std::string_view article_text) {
  return gateway_.Complete(Request(article_text)).text;
}

std::vector<AttributionVector> Attributor::PseudoLabels(const NewsArticle& article,
                                                        const std::vector<std::string>& texts) {
  std::vector<AttributionVector> out(texts.size());
  if (article.label == Label::kReal) return out;
  if (article.label != Label::kFake) {
    throw Error(ErrorCode::kInvalidArgument, "article '" + article.id + "' is unlabeled");
  }
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::string response;
    try {
      response = Elicit(texts[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "article '" + article.id + "' text #" + std::to_string(i) + ": " +
                                e.what());
    }
    const ParsedAttribution parsed = ParseAttributions(response);
    if (parsed.unparseable) {
      ++unparseable_count_;
      spdlog::warn("unrecognized attribution response for article '{}' text #{}", article.id, i);
    }
    out[i] = parsed.vector;
  }
  return out;
}

PseudoLabelStore Attributor::LabelTrainingSet(const std::vector<NewsArticle>& articles,
                                              const ReframingStore* reframings,
                                              const ToneSet& tone_set,
                                              const AttributeOptions& options) {
  struct Job {
    PseudoLabel label;
    std::string text;
  };
  std::vector<Job> jobs;
  for (const NewsArticle& a : articles) {
    if (!a.labeled()) {
      throw Error(ErrorCode::kInvalidArgument, "training article '" + a.id + "' is unlabeled");
    }
    jobs.push_back({{a.id, Variant::kOriginal, std::nullopt, {}, std::nullopt, false}, a.text});
    if (reframings == nullptr) continue;
    for (Tone t : tone_set.all()) {
      const Reframing* r = reframings->Find(a.id, t);
      if (r == nullptr) {
        throw Error(ErrorCode::kMissingArtifact, "article '" + a.id + "' has no " +
                                                     std::string(ToneName(t)) + " reframing");
      }
      const Variant v =
          ToneStyleClass(t) == StyleClass::kReliable ? Variant::kReliable : Variant::kUnreliable;
      jobs.push_back({{a.id, v, t, {}, std::nullopt, false}, r->text});
    }
  }

  // Only FAKE texts are sent to the LLM; with reuse, only the originals.
  std::vector<CompletionRequest> requests;
  std::vector<std::size_t> owners;
  std::map<std::string, Label> labels;
  for (const NewsArticle& a : articles) labels[a.id] = a.label;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    if (labels[job.label.article_id] != Label::kFake) continue;
    if (options.reuse_original_attributions && job.label.variant != Variant::kOriginal) continue;
    CompletionRequest request = Request(job.text);
    request.tags["article_id"] = job.label.article_id;
    request.tags["variant"] = std::string(VariantName(job.label.variant));
    requests.push_back(std::move(request));
    owners.push_back(i);
  }
  const std::vector<BatchResult> results = gateway_.CompleteAll(requests);
  for (std::size_t k = 0; k < results.size(); ++k) {
    Job& job = jobs[owners[k]];
    if (results[k].error) {
      try {
        std::rethrow_exception(results[k].error);
      } catch (const Error& e) {
        throw Error(e.code(), "article '" + job.label.article_id + "' (" +
                                  std::string(VariantName(job.label.variant)) + "): " + e.what());
      }
    }
    const std::string& text = results[k].response->text;
    const ParsedAttribution parsed = ParseAttributions(text);
    if (parsed.unparseable) {
      ++unparseable_count_;
      spdlog::warn("unrecognized attribution response for article '{}' ({})",
                   job.label.article_id, VariantName(job.label.variant));
    }
    job.label.bits = parsed.vector;
    job.label.raw_response = text;
    job.label.unparseable = parsed.unparseable;
  }

  PseudoLabelStore store;
  std::map<std::string, PseudoLabel> originals;
  for (Job& job : jobs) {
    if (job.label.variant == Variant::kOriginal) originals[job.label.article_id] = job.label;
  }
  for (Job& job : jobs) {
    if (options.reuse_original_attributions && job.label.variant != Variant::kOriginal) {
      const PseudoLabel& orig = originals.at(job.label.article_id);
      job.label.bits = orig.bits;
      job.label.raw_response = orig.raw_response;
      job.label.unparseable = orig.unparseable;
    }
    store.Add(std::move(job.label));
  }
  return store;
}

}  // namespace sheepdog
