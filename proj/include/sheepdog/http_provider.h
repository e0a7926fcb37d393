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

#ifndef SHEEPDOG_HTTP_PROVIDER_H_
#define SHEEPDOG_HTTP_PROVIDER_H_

#include <chrono>
#include <string>

#include "sheepdog/llm_gateway.h"

namespace sheepdog {

struct HttpProviderOptions {
  // Scheme, host and optional port, e.g. "https://api.openai.com".
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string api_key;
  std::chrono::seconds timeout{120};
};

// Client for an OpenAI-compatible chat-completions endpoint. Every prompt is
// sent as a single user message.
class HttpProvider : public CompletionProvider {
 public:
  explicit HttpProvider(HttpProviderOptions options);
  std::string Complete(const CompletionRequest& request) override;
  std::string Name() const override { return "http:" + options_.base_url; }

  // Request body sent for `request`.
  static std::string RequestBody(const CompletionRequest& request);
  // Extracts choices[0].message.content; throws PROVIDER_ERROR.
  static std::string ParseResponseBody(const std::string& body);

 private:
  HttpProviderOptions options_;
};

}  // namespace sheepdog

#endif  // SHEEPDOG_HTTP_PROVIDER_H_
