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

#ifndef SHEEPDOG_CLI_H_
#define SHEEPDOG_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace sheepdog {

inline constexpr char kVersion[] = "0.1.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line. `args[0]` is the program name. Subcommands:
// ingest, split, reframe, attribute, attack, train, eval, explain, baseline,
// consistency, plus the synth utility that writes the synthetic corpus.
//
// Artifacts live under <work-dir>/<dataset>/: corpus/ from ingest, and
// <split digest>/<stage>/ for everything downstream of split. A stage
// directory is written once; rerunning a stage fails with ARTIFACT_EXISTS.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int RunCli(int argc, const char* const* argv);

}  // namespace sheepdog

#endif  // SHEEPDOG_CLI_H_
