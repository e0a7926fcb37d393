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

#include "sheepdog/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sheepdog/error.h"
#include "sheepdog/rng.h"
#include "sheepdog/util.h"

namespace sheepdog {

using ordered_json = nlohmann::ordered_json;

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kReal: return "real";
    case Label::kFake: return "fake";
    case Label::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

int LabelIndex(Label label) {
  if (label == Label::kUnlabeled) {
    throw Error(ErrorCode::kInvalidArgument, "unlabeled article has no class index");
  }
  return static_cast<int>(label);
}

Label LabelFromIndex(int index) { return index == 0 ? Label::kReal : Label::kFake; }

Corpus::Corpus(std::string name, std::vector<NewsArticle> articles)
    : name_(std::move(name)), articles_(std::move(articles)) {
  index_.reserve(articles_.size());
  for (std::size_t i = 0; i < articles_.size(); ++i) {
    const NewsArticle& a = articles_[i];
    if (TrimWhitespace(a.text).empty()) {
      throw Error(ErrorCode::kMalformedRecord, "article '" + a.id + "' has blank text");
    }
    if (!index_.emplace(a.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate article id '" + a.id + "'");
    }
  }
}

const NewsArticle* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &articles_[it->second];
}

const NewsArticle& Corpus::at(std::string_view id) const {
  const NewsArticle* a = find(id);
  if (a == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "no article with id '" + std::string(id) + "'");
  }
  return *a;
}

std::size_t Corpus::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      articles_.begin(), articles_.end(), [label](const NewsArticle& a) { return a.label == label; }));
}

std::vector<NewsArticle> Corpus::select(const std::set<std::string>& ids) const {
  std::vector<NewsArticle> out;
  for (const NewsArticle& a : articles_) {
    if (ids.count(a.id) != 0) out.push_back(a);
  }
  return out;
}

std::string ArticleToJsonLine(const NewsArticle& article) {
  ordered_json j;
  j["id"] = article.id;
  j["text"] = article.text;
  if (article.labeled()) {
    j["label"] = std::string(LabelName(article.label));
  } else {
    j["label"] = nullptr;
  }
  if (article.timestamp) {
    j["timestamp"] = *article.timestamp;
  } else {
    j["timestamp"] = nullptr;
  }
  return j.dump();
}

NewsArticle ArticleFromJsonLine(std::string_view line) {
  const ordered_json j = ordered_json::parse(line);  // throws parse_error
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  NewsArticle a;
  if (!j.contains("id") || !j["id"].is_string()) throw std::invalid_argument("missing string \"id\"");
  if (!j.contains("text") || !j["text"].is_string()) {
    throw std::invalid_argument("missing string \"text\"");
  }
  if (!j.contains("label")) throw std::invalid_argument("missing \"label\"");
  a.id = j["id"].get<std::string>();
  a.text = j["text"].get<std::string>();
  const auto& label = j["label"];
  if (label.is_null()) {
    a.label = Label::kUnlabeled;
  } else if (label.is_string() && label.get<std::string>() == "real") {
    a.label = Label::kReal;
  } else if (label.is_string() && label.get<std::string>() == "fake") {
    a.label = Label::kFake;
  } else {
    throw std::invalid_argument("label must be \"real\", \"fake\" or null");
  }
  if (j.contains("timestamp") && !j["timestamp"].is_null()) {
    if (!j["timestamp"].is_number_integer()) throw std::invalid_argument("timestamp must be an integer");
    a.timestamp = j["timestamp"].get<int64_t>();
  }
  if (a.id.empty()) throw std::invalid_argument("empty id");
  if (TrimWhitespace(a.text).empty()) throw std::invalid_argument("text is blank");
  return a;
}

Corpus LoadCorpus(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path.string());
  std::vector<NewsArticle> articles;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty()) continue;
    NewsArticle a;
    try {
      a = ArticleFromJsonLine(line);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(a.id).second) {
      throw Error(ErrorCode::kDuplicateId, path.string() + ":" + std::to_string(line_no) +
                                               ": duplicate id '" + a.id + "'");
    }
    articles.push_back(std::move(a));
  }
  if (articles.empty()) throw Error(ErrorCode::kEmptyFile, path.string() + " contains no records");
  Corpus corpus(path.stem().string(), std::move(articles));
  if (options.balanced && corpus.count(Label::kReal) != corpus.count(Label::kFake)) {
    throw Error(ErrorCode::kClassImbalance,
                "expected balanced classes, got " + std::to_string(corpus.count(Label::kReal)) +
                    " real / " + std::to_string(corpus.count(Label::kFake)) + " fake");
  }
  return corpus;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const NewsArticle& a : corpus.articles()) {
    out += ArticleToJsonLine(a);
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

namespace {

void CheckFraction(double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test fraction must lie in (0, 1)");
  }
}

std::size_t TestCount(std::size_t class_size, double test_fraction) {
  return static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(class_size) + 0.5));
}

std::map<Label, std::vector<const NewsArticle*>> ByClass(const Corpus& corpus) {
  std::map<Label, std::vector<const NewsArticle*>> groups;
  for (const NewsArticle& a : corpus.articles()) {
    if (a.labeled()) groups[a.label].push_back(&a);
  }
  return groups;
}

}  // namespace

Split TemporalSplit(const Corpus& corpus, double test_fraction) {
  CheckFraction(test_fraction);
  std::vector<std::string> missing;
  for (const NewsArticle& a : corpus.articles()) {
    if (a.labeled() && !a.timestamp) missing.push_back(a.id);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::kMissingTimestamp, "articles without timestamp: " + list);
  }
  Split split;
  split.method = SplitMethod::kTemporal;
  for (auto& [label, group] : ByClass(corpus)) {
    std::sort(group.begin(), group.end(), [](const NewsArticle* x, const NewsArticle* y) {
      if (*x->timestamp != *y->timestamp) return *x->timestamp < *y->timestamp;
      return x->id < y->id;
    });
    const std::size_t n_test = TestCount(group.size(), test_fraction);
    const std::size_t n_train = group.size() - n_test;
    for (std::size_t i = 0; i < group.size(); ++i) {
      (i < n_train ? split.train_ids : split.test_ids).insert(group[i]->id);
    }
  }
  return split;
}

Split RandomSplit(const Corpus& corpus, double test_fraction, uint64_t seed) {
  CheckFraction(test_fraction);
  Split split;
  split.method = SplitMethod::kRandom;
  split.seed = seed;
  Rng rng(seed);
  for (auto& [label, group] : ByClass(corpus)) {
    std::vector<std::string> ids;
    ids.reserve(group.size());
    for (const NewsArticle* a : group) ids.push_back(a->id);
    std::sort(ids.begin(), ids.end());
    rng.shuffle(ids);
    const std::size_t n_test = TestCount(ids.size(), test_fraction);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < n_test ? split.test_ids : split.train_ids).insert(ids[i]);
    }
  }
  return split;
}

namespace {

ordered_json SplitToJson(const Split& split) {
  ordered_json j;
  j["method"] = split.method == SplitMethod::kTemporal ? "temporal" : "random";
  if (split.seed) {
    j["seed"] = *split.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["train_ids"] = std::vector<std::string>(split.train_ids.begin(), split.train_ids.end());
  j["test_ids"] = std::vector<std::string>(split.test_ids.begin(), split.test_ids.end());
  return j;
}

}  // namespace

std::string Split::Digest() const { return Sha256Hex(SplitToJson(*this).dump()).substr(0, 12); }

void SaveSplit(const Split& split, const std::filesystem::path& path) {
  WriteFileAtomic(path, SplitToJson(split).dump(2) + "\n");
}

Split LoadSplit(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(ReadFile(path));
    Split split;
    const std::string method = j.at("method").get<std::string>();
    if (method != "temporal" && method != "random") throw std::invalid_argument("bad method");
    split.method = method == "temporal" ? SplitMethod::kTemporal : SplitMethod::kRandom;
    if (j.contains("seed") && !j["seed"].is_null()) split.seed = j["seed"].get<uint64_t>();
    for (const auto& id : j.at("train_ids")) split.train_ids.insert(id.get<std::string>());
    for (const auto& id : j.at("test_ids")) split.test_ids.insert(id.get<std::string>());
    return split;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, path.string() + ": " + e.what());
  }
}

}  // namespace sheepdog
