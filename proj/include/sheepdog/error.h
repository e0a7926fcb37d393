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

#ifndef SHEEPDOG_ERROR_H_
#define SHEEPDOG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sheepdog {

// Categorized failure kinds. The names printed by ErrorCodeName() are the
// identifiers surfaced on the command line and in logs.
enum class ErrorCode {
  kMalformedRecord,
  kDuplicateId,
  kEmptyFile,
  kClassImbalance,
  kMissingTimestamp,
  kMissingSlot,
  kUnknownTemplate,
  kProviderError,
  kCacheMissInReplayMode,
  kTimeout,
  kEmptyReframing,
  kMissingReframing,
  kMissingArtifact,
  kTrainIdsRefused,
  kEmptyTestSet,
  kTooFewPairs,
  kNoAttributionHead,
  kInsufficientPool,
  kEmptyClaim,
  kEmptyInput,
  kArtifactExists,
  kInvalidArgument,
  kIo,
  kUsage,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, bool retryable = false);

  ErrorCode code() const { return code_; }
  // Only meaningful for provider failures: whether another attempt may help.
  bool retryable() const { return retryable_; }

 private:
  ErrorCode code_;
  bool retryable_;
};

}  // namespace sheepdog

#endif  // SHEEPDOG_ERROR_H_
