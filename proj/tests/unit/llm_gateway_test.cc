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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <nlohmann/json.hpp>

#include "oracles.h"
#include "sheepdog/http_provider.h"

// After Eigen: resolv.h, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

namespace sheepdog {
namespace {

using testing::CaughtCode;
using testing::TempDir;

CompletionRequest Req(const std::string& prompt, double temperature = 0.0) {
  CompletionRequest r;
  r.prompt = prompt;
  r.temperature = temperature;
  r.provider_model = "model-x";
  return r;
}

GatewayOptions Options(const TempDir& dir, LlmMode mode) {
  GatewayOptions o;
  o.mode = mode;
  o.cache_dir = dir / "cache";
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

TEST(CacheKeyTest, CoversSamplingParametersButNotTags) {
  CompletionRequest a = Req("hello");
  CompletionRequest b = a;
  b.tags["article_id"] = "z";
  EXPECT_EQ(CacheKey(a), CacheKey(b));
  EXPECT_NE(CacheKey(a), CacheKey(Req("hello", 0.7)));
  EXPECT_NE(CacheKey(a), CacheKey(Req("hello ")));
  CompletionRequest c = a;
  c.max_tokens = 16;
  EXPECT_NE(CacheKey(a), CacheKey(c));
  c = a;
  c.provider_model = "other";
  EXPECT_NE(CacheKey(a), CacheKey(c));
  EXPECT_EQ(CacheKey(a).size(), 64u);
}

TEST(GatewayTest, MissThenHitCallsProviderOnce) {
  TempDir dir;
  std::atomic<int> calls{0};
  auto provider = std::make_shared<ScriptedProvider>([&](const CompletionRequest& r) {
    ++calls;
    return "echo:" + r.prompt;
  });
  LlmGateway gw(Options(dir, LlmMode::kMock), provider);
  const auto first = gw.Complete(Req("p1"));
  EXPECT_FALSE(first.cached);
  EXPECT_EQ(first.text, "echo:p1");
  const auto second = gw.Complete(Req("p1"));
  EXPECT_TRUE(second.cached);
  EXPECT_EQ(second.text, "echo:p1");
  EXPECT_EQ(calls.load(), 1);
  EXPECT_EQ(gw.provider_calls(), 1u);
  EXPECT_EQ(gw.cache_hits(), 1u);
}

TEST(GatewayTest, ReplayServesCacheAndFailsOnMiss) {
  TempDir dir;
  {
    auto provider = std::make_shared<ScriptedProvider>([](const CompletionRequest&) { return "stored"; });
    LlmGateway gw(Options(dir, LlmMode::kMock), provider);
    gw.Complete(Req("known"));
  }
  LlmGateway replay(Options(dir, LlmMode::kReplay), nullptr);
  EXPECT_EQ(replay.Complete(Req("known")).text, "stored");
  EXPECT_EQ(CaughtCode([&] { replay.Complete(Req("unknown")); }), ErrorCode::kCacheMissInReplayMode);
}

TEST(GatewayTest, CacheDigestTracksContents) {
  TempDir dir;
  auto provider = std::make_shared<ScriptedProvider>([](const CompletionRequest& r) { return r.prompt; });
  LlmGateway gw(Options(dir, LlmMode::kMock), provider);
  const std::string empty = gw.cache().Digest();
  gw.Complete(Req("a"));
  const std::string one = gw.cache().Digest();
  EXPECT_NE(empty, one);
  gw.Complete(Req("a"));
  EXPECT_EQ(gw.cache().Digest(), one);
}

TEST(GatewayTest, RetriesRetryableFailuresWithBackoff) {
  TempDir dir;
  int calls = 0;
  auto provider = std::make_shared<ScriptedProvider>([&](const CompletionRequest&) -> std::string {
    if (++calls < 3) throw Error(ErrorCode::kProviderError, "busy", true);
    return "ok";
  });
  std::vector<long> sleeps;
  GatewayOptions o = Options(dir, LlmMode::kLive);
  o.initial_backoff = std::chrono::milliseconds(100);
  o.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };
  LlmGateway gw(o, provider);
  EXPECT_EQ(gw.Complete(Req("x")).text, "ok");
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(sleeps, (std::vector<long>{100, 200}));
}

TEST(GatewayTest, GivesUpAfterMaxAttemptsAndOnPermanentErrors) {
  TempDir dir;
  int calls = 0;
  auto flaky = std::make_shared<ScriptedProvider>([&](const CompletionRequest&) -> std::string {
    ++calls;
    throw Error(ErrorCode::kTimeout, "slow", true);
  });
  GatewayOptions o = Options(dir, LlmMode::kLive);
  o.max_attempts = 3;
  LlmGateway gw(o, flaky);
  EXPECT_EQ(CaughtCode([&] { gw.Complete(Req("x")); }), ErrorCode::kTimeout);
  EXPECT_EQ(calls, 3);

  calls = 0;
  auto broken = std::make_shared<ScriptedProvider>([&](const CompletionRequest&) -> std::string {
    ++calls;
    throw Error(ErrorCode::kProviderError, "bad request", false);
  });
  LlmGateway gw2(o, broken);
  EXPECT_EQ(CaughtCode([&] { gw2.Complete(Req("y")); }), ErrorCode::kProviderError);
  EXPECT_EQ(calls, 1);
  EXPECT_FALSE(gw2.cache().Lookup(CacheKey(Req("y"))).has_value());
}

TEST(GatewayTest, BatchKeepsOrderBoundsConcurrencyAndCapturesErrors) {
  TempDir dir;
  std::atomic<int> in_flight{0}, peak{0};
  auto provider = std::make_shared<ScriptedProvider>([&](const CompletionRequest& r) -> std::string {
    const int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight;
    if (r.prompt == "p7") throw Error(ErrorCode::kProviderError, "nope", false);
    return "r-" + r.prompt;
  });
  GatewayOptions o = Options(dir, LlmMode::kMock);
  o.max_concurrency = 3;
  LlmGateway gw(o, provider);
  std::vector<CompletionRequest> reqs;
  for (int i = 0; i < 24; ++i) reqs.push_back(Req("p" + std::to_string(i)));
  const auto results = gw.CompleteAll(reqs);
  ASSERT_EQ(results.size(), reqs.size());
  for (int i = 0; i < 24; ++i) {
    if (i == 7) {
      EXPECT_FALSE(results[i].response.has_value());
      EXPECT_TRUE(results[i].error != nullptr);
      continue;
    }
    ASSERT_TRUE(results[i].response.has_value());
    EXPECT_EQ(results[i].response->text, "r-p" + std::to_string(i));
  }
  EXPECT_LE(peak.load(), 3);
  EXPECT_LE(gw.peak_in_flight(), 3u);
  EXPECT_EQ(gw.CallLog().size(), 24u);
}

TEST(GatewayTest, ModeNames) {
  EXPECT_EQ(LlmModeFromName("replay"), LlmMode::kReplay);
  EXPECT_EQ(LlmModeFromName("live"), LlmMode::kLive);
  EXPECT_EQ(LlmModeFromName("mock"), LlmMode::kMock);
  EXPECT_EQ(CaughtCode([] { LlmModeFromName("online"); }), ErrorCode::kUsage);
}

class LocalServer {
 public:
  LocalServer() { port_ = server_.bind_to_any_port("127.0.0.1"); }
  ~LocalServer() {
    if (!thread_.joinable()) return;
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  // Starts serving; register handlers first.
  std::string url() {
    if (!thread_.joinable()) {
      thread_ = std::thread([this] { server_.listen_after_bind(); });
      server_.wait_until_ready();
    }
    return "http://127.0.0.1:" + std::to_string(port_);
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpProviderTest, SendsChatRequestAndParsesReply) {
  std::string seen_body, seen_auth;
  LocalServer srv;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    seen_auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Fake. Because."}}]})",
                    "application/json");
  });
  HttpProviderOptions o;
  o.base_url = srv.url();
  o.api_key = "k-123";
  o.timeout = std::chrono::seconds(5);
  HttpProvider provider(o);
  CompletionRequest r = Req("Is it real?");
  EXPECT_EQ(provider.Complete(r), "Fake. Because.");
  EXPECT_EQ(seen_auth, "Bearer k-123");
  const auto body = nlohmann::json::parse(seen_body);
  EXPECT_EQ(body["model"], "model-x");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "Is it real?");
  EXPECT_EQ(body["temperature"], 0.0);
}

TEST(HttpProviderTest, ServerErrorsAreRetryableClientErrorsAreNot) {
  LocalServer srv;
  int status = 503;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.status = status;
    res.set_content("{}", "application/json");
  });
  HttpProviderOptions o;
  o.base_url = srv.url();
  o.timeout = std::chrono::seconds(5);
  HttpProvider provider(o);
  try {
    provider.Complete(Req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProviderError);
    EXPECT_TRUE(e.retryable());
  }
  status = 400;
  try {
    provider.Complete(Req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProviderError);
    EXPECT_FALSE(e.retryable());
  }
  EXPECT_EQ(CaughtCode([] { HttpProvider::ParseResponseBody("{\"choices\":[]}"); }), ErrorCode::kProviderError);
}

TEST(HttpProviderTest, GatewayPopulatesCacheFromLiveServer) {
  TempDir dir;
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.set_content(R"({"choices":[{"message":{"content":"Real"}}]})", "application/json");
  });
  HttpProviderOptions o;
  o.base_url = srv.url();
  auto provider = std::make_shared<HttpProvider>(o);
  LlmGateway live(Options(dir, LlmMode::kLive), provider);
  EXPECT_EQ(live.Complete(Req("q")).text, "Real");
  LlmGateway replay(Options(dir, LlmMode::kReplay), nullptr);
  EXPECT_EQ(replay.Complete(Req("q")).text, "Real");
  EXPECT_EQ(hits.load(), 1);
}

}  // namespace
}  // namespace sheepdog
