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

#include "sheepdog/error.h"

namespace sheepdog {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MALFORMED_RECORD";
    case ErrorCode::kDuplicateId: return "DUPLICATE_ID";
    case ErrorCode::kEmptyFile: return "EMPTY_FILE";
    case ErrorCode::kClassImbalance: return "CLASS_IMBALANCE";
    case ErrorCode::kMissingTimestamp: return "MISSING_TIMESTAMP";
    case ErrorCode::kMissingSlot: return "MISSING_SLOT";
    case ErrorCode::kUnknownTemplate: return "UNKNOWN_TEMPLATE";
    case ErrorCode::kProviderError: return "PROVIDER_ERROR";
    case ErrorCode::kCacheMissInReplayMode: return "CACHE_MISS_IN_REPLAY_MODE";
    case ErrorCode::kTimeout: return "TIMEOUT";
    case ErrorCode::kEmptyReframing: return "EMPTY_REFRAMING";
    case ErrorCode::kMissingReframing: return "MISSING_REFRAMING";
    case ErrorCode::kMissingArtifact: return "MISSING_ARTIFACT";
    case ErrorCode::kTrainIdsRefused: return "TRAIN_IDS_REFUSED";
    case ErrorCode::kEmptyTestSet: return "EMPTY_TEST_SET";
    case ErrorCode::kTooFewPairs: return "TOO_FEW_PAIRS";
    case ErrorCode::kNoAttributionHead: return "NO_ATTRIBUTION_HEAD";
    case ErrorCode::kInsufficientPool: return "INSUFFICIENT_POOL";
    case ErrorCode::kEmptyClaim: return "EMPTY_CLAIM";
    case ErrorCode::kEmptyInput: return "EMPTY_INPUT";
    case ErrorCode::kArtifactExists: return "ARTIFACT_EXISTS";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kIo: return "IO_ERROR";
    case ErrorCode::kUsage: return "USAGE";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message, bool retryable)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      retryable_(retryable) {}

}  // namespace sheepdog
