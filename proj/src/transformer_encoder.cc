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

#include "sheepdog/transformer_encoder.h"

#include <csignal>
#include <cstring>
#include <sys/wait.h>
#include <unistd.h>

#include "sheepdog/error.h"

namespace sheepdog {
namespace {

using json = nlohmann::json;

void WriteAll(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, std::string("encoder worker write failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
}

}  // namespace

SubprocessEncoder::SubprocessEncoder(const EncoderConfig& config, uint64_t seed) : config_(config) {
  if (config.worker_command.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "transformer encoder needs a worker command");
  }
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw Error(ErrorCode::kIo, "cannot create encoder worker pipes");
  }
  pid_ = ::fork();
  if (pid_ < 0) throw Error(ErrorCode::kIo, "cannot fork encoder worker");
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", config.worker_command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_worker_ = in_pipe[1];
  from_worker_ = out_pipe[0];
  std::signal(SIGPIPE, SIG_IGN);

  const json reply = Call({{"op", "init"},
                           {"model", config.pretrained_name},
                           {"max_length", config.max_sequence_tokens},
                           {"seed", seed}});
  dim_ = reply.at("dim").get<int>();
}

SubprocessEncoder::~SubprocessEncoder() {
  if (to_worker_ >= 0) ::close(to_worker_);
  if (from_worker_ >= 0) ::close(from_worker_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

json SubprocessEncoder::Call(const json& request) const {
  std::lock_guard<std::mutex> lock(mu_);
  WriteAll(to_worker_, request.dump() + "\n");
  for (;;) {
    const size_t nl = read_buffer_.find('\n');
    if (nl != std::string::npos) {
      const std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      json reply;
      try {
        reply = json::parse(line);
      } catch (const json::exception&) {
        throw Error(ErrorCode::kIo, "encoder worker sent a non-JSON line: " + line.substr(0, 200));
      }
      if (reply.contains("error")) {
        throw Error(ErrorCode::kIo, "encoder worker: " + reply["error"].dump());
      }
      return reply;
    }
    char buf[65536];
    const ssize_t n = ::read(from_worker_, buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorCode::kIo, "encoder worker exited unexpectedly");
    read_buffer_.append(buf, static_cast<size_t>(n));
  }
}

EncoderInput SubprocessEncoder::Prepare(std::string_view text) const {
  EncoderInput input;
  input.text = std::string(text);
  return input;
}

Eigen::MatrixXd SubprocessEncoder::Encode(std::span<const EncoderInput* const> inputs) const {
  json texts = json::array();
  for (const EncoderInput* in : inputs) texts.push_back(in->text);
  const json reply = Call({{"op", "encode"}, {"texts", texts}, {"train", training_}});
  const json& h = reply.at("h");
  if (h.size() != inputs.size()) throw Error(ErrorCode::kIo, "encoder worker returned wrong batch size");
  Eigen::MatrixXd out(dim_, static_cast<Eigen::Index>(inputs.size()));
  for (size_t j = 0; j < inputs.size(); ++j) {
    if (h[j].size() != static_cast<size_t>(dim_)) {
      throw Error(ErrorCode::kIo, "encoder worker returned wrong dimension");
    }
    for (int i = 0; i < dim_; ++i) out(i, static_cast<Eigen::Index>(j)) = h[j][i].get<double>();
  }
  return out;
}

void SubprocessEncoder::Backward(std::span<const EncoderInput* const> inputs,
                                 const Eigen::MatrixXd& grad) {
  if (static_cast<size_t>(grad.cols()) != inputs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient batch does not match inputs");
  }
  json g = json::array();
  for (Eigen::Index j = 0; j < grad.cols(); ++j) {
    json col = json::array();
    for (Eigen::Index i = 0; i < grad.rows(); ++i) col.push_back(grad(i, j));
    g.push_back(std::move(col));
  }
  Call({{"op", "backward"}, {"grad", g}});
}

void SubprocessEncoder::Step(double learning_rate) { Call({{"op", "step"}, {"lr", learning_rate}}); }

void SubprocessEncoder::SaveExtra(const std::filesystem::path& dir) const {
  Call({{"op", "save"}, {"dir", (dir / "encoder").string()}});
}

void SubprocessEncoder::LoadExtra(const std::filesystem::path& dir) {
  Call({{"op", "load"}, {"dir", (dir / "encoder").string()}});
}

}  // namespace sheepdog
