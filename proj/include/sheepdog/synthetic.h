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

#ifndef SHEEPDOG_SYNTHETIC_H_
#define SHEEPDOG_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sheepdog/corpus.h"
#include "sheepdog/llm_gateway.h"
#include "sheepdog/reframer.h"

namespace sheepdog {

// Word lists for the style-shift corpus. Content words decide the label;
// tone words carry style only.
struct SyntheticVocabulary {
  std::vector<std::string> fake_content;
  std::vector<std::string> real_content;
  std::vector<std::string> filler;
  std::map<Tone, std::vector<std::string>> tone_words;

  bool IsFakeContent(std::string_view word) const;
  bool IsRealContent(std::string_view word) const;
  bool IsStyleWord(std::string_view word) const;

  std::set<std::string> fake_set, real_set, style_set;
};

struct SyntheticSpec {
  int train_per_class = 500;
  int test_per_class = 100;
  int content_pool_size = 50;  // per class
  int filler_pool_size = 400;
  int content_tokens = 4;
  int style_tokens = 6;
  int filler_tokens = 24;
  // Probability that a training article's style class matches its label
  // (reliable for REAL, unreliable for FAKE). Test articles always carry the
  // opposite style.
  double train_style_agreement = 1.0;
  uint64_t vocab_seed = 7;
  uint64_t seed = 0;
};

SyntheticVocabulary MakeSyntheticVocabulary(const SyntheticSpec& spec);

struct SyntheticDataset {
  Corpus corpus;
  // Temporal split: the test articles are the most recent ones of each class.
  Split split;
  // Fraction that reproduces `split` through TemporalSplit.
  double test_fraction = 0.0;
};

SyntheticDataset MakeSyntheticDataset(const SyntheticSpec& spec, std::string name = "synthetic");

// Deterministic stand-in for the LLM that understands every prompt template.
// kScripted rewrites only tone words (reframing and publisher restyling),
// flags "False or misleading information" when a fake content word is
// present, judges veracity by surface style, extracts the content words as
// the claim and entails a claim when all its words occur. kEcho returns the
// article unchanged for rewriting prompts, "No problems", "Real" and "Yes".
class SyntheticLlm : public CompletionProvider {
 public:
  enum class Mode { kScripted, kEcho };

  explicit SyntheticLlm(SyntheticVocabulary vocabulary, Mode mode = Mode::kScripted);

  std::string Complete(const CompletionRequest& request) override;
  std::string Name() const override { return mode_ == Mode::kScripted ? "synthetic-scripted" : "synthetic-echo"; }

 private:
  std::string Restyle(std::string_view article, const std::vector<std::string>& words, uint64_t salt) const;

  SyntheticVocabulary vocabulary_;
  Mode mode_;
};

// Publishers treated as mainstream by the scripted attack; any other name is
// restyled as a tabloid.
bool IsMainstreamPublisher(std::string_view publisher);

}  // namespace sheepdog

#endif  // SHEEPDOG_SYNTHETIC_H_
