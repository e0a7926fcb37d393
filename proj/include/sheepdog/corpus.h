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

#ifndef SHEEPDOG_CORPUS_H_
#define SHEEPDOG_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sheepdog {

enum class Label { kReal = 0, kFake = 1, kUnlabeled = 2 };

// "real" / "fake" / "unlabeled".
std::string_view LabelName(Label label);
// Index into a two-logit veracity vector. Label must be REAL or FAKE.
int LabelIndex(Label label);
Label LabelFromIndex(int index);

struct NewsArticle {
  std::string id;
  std::string text;
  Label label = Label::kUnlabeled;
  std::optional<int64_t> timestamp;

  bool labeled() const { return label != Label::kUnlabeled; }
};

// Ordered article collection with unique ids. Read-only once built.
class Corpus {
 public:
  Corpus() = default;
  // Validates every article (unique id, non-blank text).
  Corpus(std::string name, std::vector<NewsArticle> articles);

  const std::string& name() const { return name_; }
  const std::vector<NewsArticle>& articles() const { return articles_; }
  std::size_t size() const { return articles_.size(); }

  const NewsArticle* find(std::string_view id) const;
  const NewsArticle& at(std::string_view id) const;

  std::size_t count(Label label) const;

  // Articles whose id is in `ids`, in corpus order.
  std::vector<NewsArticle> select(const std::set<std::string>& ids) const;

 private:
  std::string name_;
  std::vector<NewsArticle> articles_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadOptions {
  // Require REAL count == FAKE count (balanced benchmark corpora).
  bool balanced = false;
};

// Reads a JSONL corpus: one {"id","text","label","timestamp"} object per
// line. Blank lines are ignored.
Corpus LoadCorpus(const std::filesystem::path& path, const LoadOptions& options = {});

// Writes the corpus back in the same JSONL format.
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

std::string ArticleToJsonLine(const NewsArticle& article);
NewsArticle ArticleFromJsonLine(std::string_view line);

enum class SplitMethod { kTemporal, kRandom };

struct Split {
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
  SplitMethod method = SplitMethod::kTemporal;
  std::optional<uint64_t> seed;

  // Short stable digest of (method, seed, train ids, test ids).
  std::string Digest() const;
};

// Per class, the `test_fraction` most recent articles (timestamp, ties broken
// by ascending id, so the largest ids among equal timestamps) form the test set.
Split TemporalSplit(const Corpus& corpus, double test_fraction);

// Per class stratified random split; deterministic for a given seed and
// independent of corpus article order.
Split RandomSplit(const Corpus& corpus, double test_fraction, uint64_t seed);

void SaveSplit(const Split& split, const std::filesystem::path& path);
Split LoadSplit(const std::filesystem::path& path);

}  // namespace sheepdog

#endif  // SHEEPDOG_CORPUS_H_
