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

#include "sheepdog/http_provider.h"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sheepdog/error.h"

namespace sheepdog {

HttpProvider::HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {}

std::string HttpProvider::RequestBody(const CompletionRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.provider_model;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

std::string HttpProvider::ParseResponseBody(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kProviderError, std::string("unexpected response body: ") + e.what());
  }
}

std::string HttpProvider::Complete(const CompletionRequest& request) {
  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  auto result = client.Post(options_.path, headers, RequestBody(request), "application/json");
  if (!result) {
    const httplib::Error err = result.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::kTimeout, "request timed out (" + httplib::to_string(err) + ")", true);
    }
    throw Error(ErrorCode::kProviderError, "transport failure: " + httplib::to_string(err), true);
  }
  const int status = result->status;
  if (status == 429 || status >= 500) {
    throw Error(ErrorCode::kProviderError, "HTTP " + std::to_string(status), true);
  }
  if (status < 200 || status >= 300) {
    throw Error(ErrorCode::kProviderError,
                "HTTP " + std::to_string(status) + ": " + result->body.substr(0, 200));
  }
  return ParseResponseBody(result->body);
}

}  // namespace sheepdog
