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

#ifndef SHEEPDOG_LLM_GATEWAY_H_
#define SHEEPDOG_LLM_GATEWAY_H_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheepdog/prompts.h"

namespace sheepdog {

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 512;
  std::string provider_model = "gpt-3.5-turbo-0301";
  // Free-form annotations (template, article id, publisher, ...). Recorded in
  // the call log; not part of the cache key.
  std::map<std::string, std::string> tags;
};

struct CompletionResponse {
  std::string text;
  bool cached = false;
  std::map<std::string, std::string> provider_metadata;
};

// Reference sampling parameters per template: 0.7 / 512 tokens for the
// rewriting prompts, 0.0 for the classification-style prompts.
struct GenerationParams {
  double temperature;
  int max_tokens;
};
GenerationParams DefaultParams(TemplateId id);

// Renders `id` with `slots` and applies DefaultParams; tags the request with
// the template name.
CompletionRequest MakeRequest(TemplateId id, const Slots& slots, std::string_view provider_model);

// SHA-256 over a length-prefixed serialization of (prompt, temperature,
// max_tokens, provider_model). Stable across runs and platforms.
std::string CacheKey(const CompletionRequest& request);

// Text-completion backend. Implementations throw sheepdog::Error with
// PROVIDER_ERROR or TIMEOUT; Error::retryable() tells the gateway whether to
// try again.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string Complete(const CompletionRequest& request) = 0;
  virtual std::string Name() const = 0;
};

// Provider backed by a callable; used for scripted mocks.
class ScriptedProvider : public CompletionProvider {
 public:
  using Script = std::function<std::string(const CompletionRequest&)>;
  explicit ScriptedProvider(Script script, std::string name = "scripted");
  std::string Complete(const CompletionRequest& request) override;
  std::string Name() const override { return name_; }

 private:
  Script script_;
  std::string name_;
};

// One file per key under a directory: the file name is the hex key, the
// content a one-line metadata header followed by the raw response text.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<std::string> Lookup(const std::string& key) const;
  void Store(const std::string& key, const CompletionRequest& request, std::string_view text) const;

  // SHA-256 over the sorted (file name, content) pairs; empty directory
  // digests to the hash of the empty string.
  std::string Digest() const;

 private:
  std::filesystem::path dir_;
};

enum class LlmMode { kLive, kReplay, kMock };
std::string_view LlmModeName(LlmMode mode);
LlmMode LlmModeFromName(std::string_view name);

struct GatewayOptions {
  LlmMode mode = LlmMode::kReplay;
  std::filesystem::path cache_dir = "llm_cache";
  std::size_t max_concurrency = 4;
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds max_backoff{30000};
  // Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct CallRecord {
  std::string key;
  std::map<std::string, std::string> tags;
  bool cached = false;
  bool ok = true;
};

// Outcome of one request in a batch.
struct BatchResult {
  std::optional<CompletionResponse> response;
  std::exception_ptr error;
};

// Cache-first dispatcher. Safe for concurrent callers.
class LlmGateway {
 public:
  // `provider` may be null in replay mode.
  LlmGateway(GatewayOptions options, std::shared_ptr<CompletionProvider> provider);

  // Cache hit: cached text, no provider call. Miss: replay mode fails with
  // CACHE_MISS_IN_REPLAY_MODE; otherwise the provider is called with up to
  // max_attempts tries and exponential backoff, and the text is stored.
  CompletionResponse Complete(const CompletionRequest& request);

  // Runs every request on up to max_concurrency threads. Results are in
  // request order; failures are captured per request.
  std::vector<BatchResult> CompleteAll(const std::vector<CompletionRequest>& requests);

  std::vector<CallRecord> CallLog() const;
  std::size_t provider_calls() const;
  std::size_t cache_hits() const;
  std::size_t peak_in_flight() const;

  const GatewayOptions& options() const { return options_; }
  const ResponseCache& cache() const { return cache_; }

 private:
  std::string CallProviderWithRetry(const CompletionRequest& request);
  void Record(CallRecord record);

  GatewayOptions options_;
  std::shared_ptr<CompletionProvider> provider_;
  ResponseCache cache_;

  mutable std::mutex mu_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;
  std::size_t peak_in_flight_ = 0;
  std::size_t provider_calls_ = 0;
  std::size_t cache_hits_ = 0;
  std::vector<CallRecord> log_;
};

}  // namespace sheepdog

#endif  // SHEEPDOG_LLM_GATEWAY_H_
