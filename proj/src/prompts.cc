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

#include "sheepdog/prompts.h"

#include <array>
#include <cctype>
#include <variant>

#include "sheepdog/error.h"

namespace sheepdog {

const char kAttributionQuestion[] =
    "Which of the following problems does this article have? Lack of credible sources, "
    "False or misleading information, Biased opinion, Inconsistencies with reputable "
    "sources. If multiple options apply, provide a comma-separated list ordered from most "
    "to least related. Answer \"No problems\" if none of the options apply.";

const char kDetectionQuestion[] =
    "Does the following contain real or fake news (or information)? Answer in one word "
    "with either 'Real' or 'Fake', then explain why.";

namespace {

struct SlotRef {
  const char* name;
};

// A template is a sequence of literal text and slot references.
using Piece = std::variant<const char*, SlotRef>;

struct TemplateDef {
  TemplateId id;
  const char* name;
  std::vector<Piece> pieces;
};

const std::vector<TemplateDef>& Templates() {
  static const std::vector<TemplateDef> kTemplates = {
      {TemplateId::kAttackRestyle,
       "ATTACK_RESTYLE",
       {"Rewrite the following article using the style of ", SlotRef{"publisher"}, ": ",
        SlotRef{"article"}}},
      // The a/an between "in" and the tone is resolved in RenderPrompt.
      {TemplateId::kReframeTone,
       "REFRAME_TONE",
       {"Rewrite the following article in ", SlotRef{"tone"}, " tone: ", SlotRef{"article"}}},
      {TemplateId::kAttribution,
       "ATTRIBUTION",
       {"Article: ", SlotRef{"article"}, "\nQuestion: ", kAttributionQuestion}},
      {TemplateId::kZeroShotDetect,
       "ZERO_SHOT_DETECT",
       {"Question: ", kDetectionQuestion, " ", SlotRef{"article"}, "\nAnswer:"}},
      {TemplateId::kClaimExtract,
       "CLAIM_EXTRACT",
       {"Extract and summarize the central factual claim in the following article. Article: ",
        SlotRef{"article"}, ". Claim:"}},
      {TemplateId::kClaimEntail,
       "CLAIM_ENTAIL",
       {"Question: Does the following article entail the claim: ", SlotRef{"claim"},
        "? Answer in one word with either 'Yes' or 'No'. Article: ", SlotRef{"article"}, "."}},
      {TemplateId::kIclDetect,
       "ICL_DETECT",
       {SlotRef{"demonstrations"}, "\n\nQuestion: ", kDetectionQuestion, " ", SlotRef{"article"},
        "\nAnswer:"}},
  };
  return kTemplates;
}

const TemplateDef& Find(TemplateId id) {
  for (const auto& t : Templates()) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::kUnknownTemplate, "template id " + std::to_string(static_cast<int>(id)));
}

}  // namespace

std::string_view TemplateName(TemplateId id) { return Find(id).name; }

TemplateId TemplateFromName(std::string_view name) {
  for (const auto& t : Templates()) {
    if (name == t.name) return t.id;
  }
  throw Error(ErrorCode::kUnknownTemplate, "unknown template '" + std::string(name) + "'");
}

std::vector<std::string> RequiredSlots(TemplateId id) {
  std::vector<std::string> names;
  for (const Piece& p : Find(id).pieces) {
    if (const auto* slot = std::get_if<SlotRef>(&p)) names.emplace_back(slot->name);
  }
  return names;
}

std::string_view IndefiniteArticle(std::string_view next_word) {
  if (next_word.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(next_word.front()))) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return "an";
    default:
      return "a";
  }
}

std::string RenderPrompt(TemplateId id, const Slots& slots) {
  const TemplateDef& def = Find(id);
  std::string out;
  for (const Piece& p : def.pieces) {
    if (const auto* literal = std::get_if<const char*>(&p)) {
      out += *literal;
      continue;
    }
    const char* name = std::get<SlotRef>(p).name;
    auto it = slots.find(std::string_view(name));
    if (it == slots.end()) {
      throw Error(ErrorCode::kMissingSlot,
                  std::string(def.name) + " requires slot '" + name + "'");
    }
    if (id == TemplateId::kReframeTone && std::string_view(name) == "tone") {
      out += IndefiniteArticle(it->second);
      out += ' ';
    }
    out += it->second;
  }
  return out;
}

std::string RenderPrompt(std::string_view template_name, const Slots& slots) {
  return RenderPrompt(TemplateFromName(template_name), slots);
}

}  // namespace sheepdog
