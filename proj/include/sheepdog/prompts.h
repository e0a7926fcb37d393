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

#ifndef SHEEPDOG_PROMPTS_H_
#define SHEEPDOG_PROMPTS_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sheepdog {

enum class TemplateId {
  kAttackRestyle,
  kReframeTone,
  kAttribution,
  kZeroShotDetect,
  kClaimExtract,
  kClaimEntail,
  kIclDetect,
};

using Slots = std::map<std::string, std::string, std::less<>>;

// "ATTACK_RESTYLE", "REFRAME_TONE", ...
std::string_view TemplateName(TemplateId id);
// Throws UNKNOWN_TEMPLATE.
TemplateId TemplateFromName(std::string_view name);

// Slot names the template requires, in order of appearance.
std::vector<std::string> RequiredSlots(TemplateId id);

// Byte-exact instantiation of a prompt template. Slot values are spliced in
// verbatim and never rescanned, so article text containing brace markers is
// safe. Throws MISSING_SLOT when a required slot is absent.
//
//   ATTACK_RESTYLE   {publisher, article}
//   REFRAME_TONE     {tone, article}     tone is the surface string; the
//                                        indefinite article a/an is chosen
//                                        from its first letter
//   ATTRIBUTION      {article}
//   ZERO_SHOT_DETECT {article}
//   CLAIM_EXTRACT    {article}
//   CLAIM_ENTAIL     {claim, article}
//   ICL_DETECT       {demonstrations, article}
std::string RenderPrompt(TemplateId id, const Slots& slots);
std::string RenderPrompt(std::string_view template_name, const Slots& slots);

// "a" or "an" for the given following word.
std::string_view IndefiniteArticle(std::string_view next_word);

// The fixed rationale question appended to every attribution prompt.
extern const char kAttributionQuestion[];
// The zero-shot veracity question shared by the detection prompts.
extern const char kDetectionQuestion[];

}  // namespace sheepdog

#endif  // SHEEPDOG_PROMPTS_H_
