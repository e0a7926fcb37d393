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

#include "sheepdog/llm_gateway.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sheepdog/error.h"
#include "sheepdog/util.h"

namespace sheepdog {

namespace {

constexpr std::string_view kCacheMagic = "#sheepdog-cache v1 ";

std::string FormatReal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

GenerationParams DefaultParams(TemplateId id) {
  switch (id) {
    case TemplateId::kReframeTone:
    case TemplateId::kAttackRestyle:
      return {0.7, 512};
    default:
      return {0.0, 512};
  }
}

CompletionRequest MakeRequest(TemplateId id, const Slots& slots, std::string_view provider_model) {
  CompletionRequest request;
  request.prompt = RenderPrompt(id, slots);
  const GenerationParams params = DefaultParams(id);
  request.temperature = params.temperature;
  request.max_tokens = params.max_tokens;
  request.provider_model = std::string(provider_model);
  request.tags["template"] = std::string(TemplateName(id));
  return request;
}

std::string CacheKey(const CompletionRequest& request) {
  std::string buf = "sheepdog-completion/v1\n";
  buf += "prompt:" + std::to_string(request.prompt.size()) + ":" + request.prompt + "\n";
  buf += "temperature:" + FormatReal(request.temperature) + "\n";
  buf += "max_tokens:" + std::to_string(request.max_tokens) + "\n";
  buf += "model:" + std::to_string(request.provider_model.size()) + ":" + request.provider_model +
         "\n";
  return Sha256Hex(buf);
}

ScriptedProvider::ScriptedProvider(Script script, std::string name)
    : script_(std::move(script)), name_(std::move(name)) {}

std::string ScriptedProvider::Complete(const CompletionRequest& request) { return script_(request); }

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<std::string> ResponseCache::Lookup(const std::string& key) const {
  const std::filesystem::path path = dir_ / key;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  std::string contents = ReadFile(path);
  const std::size_t newline = contents.find('\n');
  if (contents.compare(0, kCacheMagic.size(), kCacheMagic) != 0 || newline == std::string::npos) {
    throw Error(ErrorCode::kIo, "corrupt cache entry " + path.string());
  }
  return contents.substr(newline + 1);
}

void ResponseCache::Store(const std::string& key, const CompletionRequest& request,
                          std::string_view text) const {
  nlohmann::ordered_json meta;
  meta["model"] = request.provider_model;
  meta["temperature"] = request.temperature;
  meta["max_tokens"] = request.max_tokens;
  meta["prompt_sha256"] = Sha256Hex(request.prompt);
  std::string contents(kCacheMagic);
  contents += meta.dump();
  contents += '\n';
  contents += text;
  WriteFileAtomic(dir_ / key, contents);
}

std::string ResponseCache::Digest() const {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  if (std::filesystem::is_directory(dir_, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.find(".tmp.") == std::string::npos) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  std::string buf;
  for (const auto& f : files) {
    buf += f.filename().string() + "\n" + Sha256Hex(ReadFile(f)) + "\n";
  }
  return Sha256Hex(buf);
}

std::string_view LlmModeName(LlmMode mode) {
  switch (mode) {
    case LlmMode::kLive: return "live";
    case LlmMode::kReplay: return "replay";
    case LlmMode::kMock: return "mock";
  }
  return "replay";
}

LlmMode LlmModeFromName(std::string_view name) {
  if (name == "live") return LlmMode::kLive;
  if (name == "replay") return LlmMode::kReplay;
  if (name == "mock") return LlmMode::kMock;
  throw Error(ErrorCode::kUsage, "--llm-mode must be live, replay or mock");
}

LlmGateway::LlmGateway(GatewayOptions options, std::shared_ptr<CompletionProvider> provider)
    : options_(std::move(options)), provider_(std::move(provider)), cache_(options_.cache_dir) {
  if (options_.max_concurrency == 0) options_.max_concurrency = 1;
  if (options_.max_attempts < 1) options_.max_attempts = 1;
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (options_.mode != LlmMode::kReplay && !provider_) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(LlmModeName(options_.mode)) + " mode requires a provider");
  }
}

CompletionResponse LlmGateway::Complete(const CompletionRequest& request) {
  const std::string key = CacheKey(request);
  if (auto hit = cache_.Lookup(key)) {
    CompletionResponse response;
    response.text = std::move(*hit);
    response.cached = true;
    response.provider_metadata["cache_key"] = key;
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++cache_hits_;
    }
    Record({key, request.tags, true, true});
    return response;
  }
  if (options_.mode == LlmMode::kReplay) {
    Record({key, request.tags, false, false});
    std::string what = "no cached response for key " + key;
    if (auto it = request.tags.find("template"); it != request.tags.end()) {
      what += " (" + it->second + ")";
    }
    throw Error(ErrorCode::kCacheMissInReplayMode, what);
  }
  std::string text;
  try {
    text = CallProviderWithRetry(request);
  } catch (...) {
    Record({key, request.tags, false, false});
    throw;
  }
  cache_.Store(key, request, text);
  Record({key, request.tags, false, true});
  CompletionResponse response;
  response.text = std::move(text);
  response.cached = false;
  response.provider_metadata["cache_key"] = key;
  response.provider_metadata["provider"] = provider_->Name();
  return response;
}

std::string LlmGateway::CallProviderWithRetry(const CompletionRequest& request) {
  std::chrono::milliseconds backoff = options_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    {
      std::unique_lock<std::mutex> lock(mu_);
      slot_cv_.wait(lock, [this] { return in_flight_ < options_.max_concurrency; });
      ++in_flight_;
      ++provider_calls_;
      peak_in_flight_ = std::max(peak_in_flight_, in_flight_);
    }
    auto release = [this] {
      {
        std::lock_guard<std::mutex> lock(mu_);
        --in_flight_;
      }
      slot_cv_.notify_one();
    };
    try {
      std::string text = provider_->Complete(request);
      release();
      return text;
    } catch (const Error& e) {
      release();
      if (!e.retryable() || attempt >= options_.max_attempts) {
        if (e.code() == ErrorCode::kTimeout) throw;
        throw Error(ErrorCode::kProviderError,
                    "after " + std::to_string(attempt) + " attempt(s): " + e.what());
      }
      spdlog::warn("provider attempt {} failed ({}); retrying in {} ms", attempt, e.what(),
                   backoff.count());
    } catch (const std::exception& e) {
      release();
      throw Error(ErrorCode::kProviderError, e.what());
    }
    options_.sleep(backoff);
    backoff = std::min(backoff * 2, options_.max_backoff);
  }
}

std::vector<BatchResult> LlmGateway::CompleteAll(const std::vector<CompletionRequest>& requests) {
  std::vector<BatchResult> results(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < requests.size(); i = next.fetch_add(1)) {
      try {
        results[i].response = Complete(requests[i]);
      } catch (...) {
        results[i].error = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(options_.max_concurrency, requests.size());
  if (n_threads <= 1) {
    worker();
    return results;
  }
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return results;
}

void LlmGateway::Record(CallRecord record) {
  std::lock_guard<std::mutex> lock(mu_);
  log_.push_back(std::move(record));
}

std::vector<CallRecord> LlmGateway::CallLog() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

std::size_t LlmGateway::provider_calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return provider_calls_;
}

std::size_t LlmGateway::cache_hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_hits_;
}

std::size_t LlmGateway::peak_in_flight() const {
  std::lock_guard<std::mutex> lock(mu_);
  return peak_in_flight_;
}

}  // namespace sheepdog
