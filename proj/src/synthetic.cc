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

#include "sheepdog/synthetic.h"

#include <algorithm>
#include <cmath>

#include "sheepdog/error.h"
#include "sheepdog/model.h"
#include "sheepdog/prompts.h"
#include "sheepdog/rng.h"

namespace sheepdog {
namespace {

const std::map<Tone, std::vector<std::string>>& ToneWordLists() {
  static const auto* lists = new std::map<Tone, std::vector<std::string>>{
      {Tone::kObjectiveProfessional,
       {"according", "officials", "reported", "statement", "analysis", "documented", "spokesperson",
        "confirmed", "records", "percent", "survey", "published"}},
      {Tone::kNeutral,
       {"said", "noted", "week", "announced", "described", "update", "today", "mentioned", "plans",
        "meeting", "added", "observed"}},
      {Tone::kEmotionallyTriggering,
       {"heartbreaking", "outrage", "terrifying", "devastating", "furious", "tragic", "disgusting",
        "tears", "betrayal", "fear", "horrifying", "grief"}},
      {Tone::kSensational,
       {"shocking", "bombshell", "explosive", "unbelievable", "scandal", "exposed", "insane", "jaw",
        "dropping", "secret", "stunning", "revealed"}},
  };
  return *lists;
}

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                   "s", "t", "v", "z", "br", "dr", "kl", "st", "tr", "gr"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};

std::string PseudoWord(Rng& rng) {
  std::string w;
  const size_t syllables = 2 + rng.uniform_index(2);
  for (size_t s = 0; s < syllables; ++s) {
    w += kOnsets[rng.uniform_index(std::size(kOnsets))];
    w += kVowels[rng.uniform_index(std::size(kVowels))];
  }
  return w;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

// Text after `marker`, or nullopt when absent.
std::optional<std::string_view> After(std::string_view s, std::string_view marker) {
  const size_t pos = s.find(marker);
  if (pos == std::string_view::npos) return std::nullopt;
  return s.substr(pos + marker.size());
}

std::string_view StripSuffix(std::string_view s, std::string_view suffix) {
  if (s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
    s.remove_suffix(suffix.size());
  }
  return s;
}

[[noreturn]] void Unrecognized(std::string_view prompt) {
  throw Error(ErrorCode::kProviderError,
              "synthetic LLM cannot interpret prompt: " + std::string(prompt.substr(0, 80)), false);
}

}  // namespace

bool SyntheticVocabulary::IsFakeContent(std::string_view word) const {
  return fake_set.count(std::string(word)) > 0;
}
bool SyntheticVocabulary::IsRealContent(std::string_view word) const {
  return real_set.count(std::string(word)) > 0;
}
bool SyntheticVocabulary::IsStyleWord(std::string_view word) const {
  return style_set.count(std::string(word)) > 0;
}

bool IsMainstreamPublisher(std::string_view publisher) {
  static const std::set<std::string, std::less<>> kMainstream = {
      "CNN", "The New York Times", "Reuters", "Associated Press", "BBC", "The Washington Post"};
  return kMainstream.count(publisher) > 0;
}

SyntheticVocabulary MakeSyntheticVocabulary(const SyntheticSpec& spec) {
  SyntheticVocabulary v;
  v.tone_words = ToneWordLists();
  for (const auto& [tone, words] : v.tone_words) v.style_set.insert(words.begin(), words.end());
  Rng rng(spec.vocab_seed);
  std::set<std::string> used = v.style_set;
  auto draw = [&](int n, std::vector<std::string>& out, std::set<std::string>* index) {
    while (static_cast<int>(out.size()) < n) {
      std::string w = PseudoWord(rng);
      if (!used.insert(w).second) continue;
      if (index != nullptr) index->insert(w);
      out.push_back(std::move(w));
    }
  };
  draw(spec.content_pool_size, v.fake_content, &v.fake_set);
  draw(spec.content_pool_size, v.real_content, &v.real_set);
  draw(spec.filler_pool_size, v.filler, nullptr);
  return v;
}

SyntheticDataset MakeSyntheticDataset(const SyntheticSpec& spec, std::string name) {
  if (spec.train_per_class <= 0 || spec.test_per_class <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic class sizes must be positive");
  }
  const SyntheticVocabulary vocab = MakeSyntheticVocabulary(spec);
  Rng rng(spec.seed);
  const ToneSet tones = MakeToneSet(ToneSetName::kFull);

  auto make_text = [&](Label label, bool reliable_style) {
    const auto& content = label == Label::kFake ? vocab.fake_content : vocab.real_content;
    const auto& tone_choices = reliable_style ? tones.reliable : tones.unreliable;
    const Tone tone = tone_choices[rng.uniform_index(tone_choices.size())];
    const auto& style = vocab.tone_words.at(tone);
    std::vector<std::string> words;
    for (int i = 0; i < spec.content_tokens; ++i) words.push_back(content[rng.uniform_index(content.size())]);
    for (int i = 0; i < spec.style_tokens; ++i) words.push_back(style[rng.uniform_index(style.size())]);
    for (int i = 0; i < spec.filler_tokens; ++i) words.push_back(vocab.filler[rng.uniform_index(vocab.filler.size())]);
    rng.shuffle(words);
    return JoinWords(words);
  };

  std::vector<NewsArticle> articles;
  SyntheticDataset out;
  int64_t clock = 0;
  int next_id = 0;
  auto add = [&](Label label, bool test) {
    const bool agrees = test ? false : rng.uniform01() < spec.train_style_agreement;
    const bool reliable_style = (label == Label::kReal) == agrees;
    NewsArticle a;
    char id[32];
    std::snprintf(id, sizeof(id), "syn-%05d", next_id++);
    a.id = id;
    a.label = label;
    a.text = make_text(label, reliable_style);
    a.timestamp = ++clock;
    (test ? out.split.test_ids : out.split.train_ids).insert(a.id);
    articles.push_back(std::move(a));
  };
  for (int i = 0; i < spec.train_per_class; ++i) {
    add(Label::kReal, false);
    add(Label::kFake, false);
  }
  for (int i = 0; i < spec.test_per_class; ++i) {
    add(Label::kReal, true);
    add(Label::kFake, true);
  }
  out.corpus = Corpus(std::move(name), std::move(articles));
  out.split.method = SplitMethod::kTemporal;
  out.test_fraction = static_cast<double>(spec.test_per_class) /
                      static_cast<double>(spec.train_per_class + spec.test_per_class);
  return out;
}

SyntheticLlm::SyntheticLlm(SyntheticVocabulary vocabulary, Mode mode)
    : vocabulary_(std::move(vocabulary)), mode_(mode) {}

std::string SyntheticLlm::Restyle(std::string_view article, const std::vector<std::string>& words,
                                  uint64_t salt) const {
  Rng rng(HashFeature(article, salt));
  std::vector<std::string> tokens = SplitWords(article);
  for (auto& t : tokens) {
    if (vocabulary_.IsStyleWord(t)) t = words[rng.uniform_index(words.size())];
  }
  return JoinWords(tokens);
}

std::string SyntheticLlm::Complete(const CompletionRequest& request) {
  const std::string_view prompt = request.prompt;
  const bool echo = mode_ == Mode::kEcho;

  if (auto rest = After(prompt, "Rewrite the following article in "); rest && prompt.starts_with("Rewrite")) {
    const size_t sep = rest->find(" tone: ");
    if (sep == std::string_view::npos) Unrecognized(prompt);
    std::string_view surface = rest->substr(0, sep);
    surface = surface.substr(surface.find(' ') + 1);  // drop "a"/"an"
    const std::string_view article = rest->substr(sep + 7);
    if (echo) return std::string(article);
    const Tone tone = ToneFromName(surface);
    return Restyle(article, vocabulary_.tone_words.at(tone), 0x7e57 + static_cast<uint64_t>(tone));
  }

  if (auto rest = After(prompt, "Rewrite the following article using the style of ");
      rest && prompt.starts_with("Rewrite")) {
    const size_t sep = rest->find(": ");
    if (sep == std::string_view::npos) Unrecognized(prompt);
    const std::string_view publisher = rest->substr(0, sep);
    const std::string_view article = rest->substr(sep + 2);
    if (echo) return std::string(article);
    const bool mainstream = IsMainstreamPublisher(publisher);
    std::vector<std::string> words;
    for (const auto& [tone, list] : vocabulary_.tone_words) {
      if ((ToneStyleClass(tone) == StyleClass::kReliable) == mainstream) {
        words.insert(words.end(), list.begin(), list.end());
      }
    }
    return Restyle(article, words, HashFeature(publisher, 0xa77ac));
  }

  if (prompt.starts_with("Article: ")) {
    const size_t end = prompt.find("\nQuestion: ");
    if (end == std::string_view::npos) Unrecognized(prompt);
    if (echo) return "No problems.";
    for (const auto& t : Tokenize(prompt.substr(9, end - 9))) {
      if (vocabulary_.IsFakeContent(t)) return "False or misleading information.";
    }
    return "No problems.";
  }

  if (prompt.starts_with("Extract and summarize")) {
    auto rest = After(prompt, "Article: ");
    if (!rest) Unrecognized(prompt);
    const std::string_view article = StripSuffix(*rest, ". Claim:");
    if (echo) return std::string(article);
    std::vector<std::string> claim;
    const std::vector<std::string> tokens = Tokenize(article);
    for (const auto& t : tokens) {
      if (vocabulary_.IsFakeContent(t) || vocabulary_.IsRealContent(t)) claim.push_back(t);
    }
    if (claim.empty()) {
      claim.assign(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(std::min<size_t>(8, tokens.size())));
    }
    return JoinWords(claim);
  }

  if (auto rest = After(prompt, "Does the following article entail the claim: ")) {
    const size_t q = rest->find("? Answer in one word");
    auto article = After(*rest, " Article: ");
    if (q == std::string_view::npos || !article) Unrecognized(prompt);
    if (echo) return "Yes";
    const std::vector<std::string> body = Tokenize(StripSuffix(*article, "."));
    const std::set<std::string> present(body.begin(), body.end());
    for (const auto& t : Tokenize(rest->substr(0, q))) {
      if (present.count(t) == 0) return "No";
    }
    return "Yes";
  }

  const std::string question = std::string(kDetectionQuestion) + " ";
  if (const size_t pos = prompt.rfind(question); pos != std::string_view::npos) {
    if (echo) return "Real";
    std::string_view article = prompt.substr(pos + question.size());
    article = StripSuffix(article, "\nAnswer:");
    int reliable = 0, unreliable = 0;
    for (const auto& t : Tokenize(article)) {
      for (const auto& [tone, list] : vocabulary_.tone_words) {
        if (std::find(list.begin(), list.end(), t) == list.end()) continue;
        (ToneStyleClass(tone) == StyleClass::kReliable ? reliable : unreliable) += 1;
      }
    }
    return unreliable > reliable ? "Fake. The article reads as sensational."
                                 : "Real. The article reads as measured reporting.";
  }

  Unrecognized(prompt);
}

}  // namespace sheepdog
