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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coavoid/devicelog.h"
#include "coavoid/filter.h"
#include "coavoid/finematch/protocol.h"

namespace coavoid::finematch {

enum class CoarseClass { kHit, kWormholeSuspect, kReplaySuspect };

std::string_view CoarseClassName(CoarseClass c);

// One exchange/record pair with equal RPIs. Different cell digests make a
// wormhole suspect; equal digests with a sighting time more than one
// interval away from the record's interval make a replay suspect; anything
// else is a hit.
struct CoarseMatch {
  size_t exchange = 0;
  size_t record = 0;
  CoarseClass kind = CoarseClass::kHit;
};

// Pairs are reported in exchange order, then record order.
std::vector<CoarseMatch> CoarseMatchRecords(
    std::span<const devicelog::ExchangeRecord> exchanges,
    std::span<const filter::RecombinedRecord> downloaded);

// Verification log lines.
//   Location Verification[1]: [INFO] [P] <hex> [U] <hex> [Wormhole Attack|Correct]
//   Location Verification[2]: [INFO] [Final] <D> [Wormhole Attack|Correct]
//   Timestamp Verification: [INFO] [P] <day:interval> [U] <day:interval> [Replay Attack|Correct]
std::string LocationLogLine(const geocell::CellDigest& patient,
                            const geocell::CellDigest& user);
std::string FinalLogLine(const Decision& decision);
std::string TimestampLogLine(keysched::IntervalTime patient,
                             keysched::IntervalTime user, bool valid);

}  // namespace coavoid::finematch
