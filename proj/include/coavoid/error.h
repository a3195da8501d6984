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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coavoid {

enum class ErrorCode {
  kIntervalOutOfRange,
  kResolutionOutOfRange,
  kInvalidCoordinate,
  kMissingBroadcast,
  kMalformedPayload,
  kEpochFromFuture,
  kUnknownSession,
  kConstraintViolation,
  kCoordinateOverflow,
  kSanityCheckFailed,
  kNoiseOverflow,
  kSecretsConsumed,
  kLevelOutOfRange,
  kNoHits,
  kConfigInvalid,
  kScenarioInvalid,
  kIoFailure,
  kParseError,
  kCryptoFailure,
};

std::string_view ErrorCodeName(ErrorCode code);
// Inverse of ErrorCodeName; false for unknown names.
bool ErrorCodeFromName(std::string_view name, ErrorCode* code);

// All recoverable failures in the library surface as coavoid::Error. The
// code identifies the contract that was violated; what() carries detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Throw(ErrorCode code, const std::string& detail);

}  // namespace coavoid

#define COAVOID_ENFORCE(cond, code, detail)   \
  do {                                        \
    if (!(cond)) ::coavoid::Throw(code, detail); \
  } while (false)
