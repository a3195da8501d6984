// Copyright 2026 The CoAvoid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coavoid/error.h"

#include <string>

namespace coavoid {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIntervalOutOfRange: return "IntervalOutOfRange";
    case ErrorCode::kResolutionOutOfRange: return "ResolutionOutOfRange";
    case ErrorCode::kInvalidCoordinate: return "InvalidCoordinate";
    case ErrorCode::kMissingBroadcast: return "MissingBroadcast";
    case ErrorCode::kMalformedPayload: return "MalformedPayload";
    case ErrorCode::kEpochFromFuture: return "EpochFromFuture";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kConstraintViolation: return "ConstraintViolation";
    case ErrorCode::kCoordinateOverflow: return "CoordinateOverflow";
    case ErrorCode::kSanityCheckFailed: return "SanityCheckFailed";
    case ErrorCode::kNoiseOverflow: return "NoiseOverflow";
    case ErrorCode::kSecretsConsumed: return "SecretsConsumed";
    case ErrorCode::kLevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::kNoHits: return "NoHits";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kCryptoFailure: return "CryptoFailure";
  }
  return "Unknown";
}

bool ErrorCodeFromName(std::string_view name, ErrorCode* code) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kCryptoFailure); ++i) {
    auto c = static_cast<ErrorCode>(i);
    if (ErrorCodeName(c) == name) {
      *code = c;
      return true;
    }
  }
  return false;
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + detail),
      code_(code) {}

void Throw(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace coavoid
