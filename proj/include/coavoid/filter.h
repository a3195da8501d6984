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

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coavoid/devicelog.h"
#include "coavoid/geocell.h"
#include "coavoid/keysched.h"

// Patient-side upload preparation. Only intervals in which the patient
// actually exchanged identifiers are uploaded, and each is uploaded under the
// patient's own broadcast RPI for that interval paired with the cell digest
// recorded at the exchange. Partner RPIs never leave the device.
namespace coavoid::filter {

struct RecombinedRecord {
  Key16 rpi{};
  geocell::CellDigest cell_digest;
  keysched::IntervalTime coarse_time;
  uint32_t multiplicity = 1;

  bool operator==(const RecombinedRecord&) const = default;
};

// (day, interval, digest, rpi) order used for every upload.
bool UploadOrder(const RecombinedRecord& a, const RecombinedRecord& b);

// One record per exchange, sorted by UploadOrder. Throws kMissingBroadcast
// when an exchange interval has no own broadcast.
std::vector<RecombinedRecord> FilterAndRecombine(
    std::span<const devicelog::ExchangeRecord> exchanges,
    std::span<const devicelog::BroadcastRecord> broadcasts);

// Collapses records equal in (rpi, digest, coarse_time), summing
// multiplicities. Output stays in UploadOrder.
std::vector<RecombinedRecord> DedupePolicy(std::vector<RecombinedRecord> records);

// <32-hex rpi> TAB <64-hex digest> TAB <day>:<interval> TAB <multiplicity>
std::string FormatUploadLine(const RecombinedRecord& r);
RecombinedRecord ParseUploadLine(std::string_view line);

// Newline-terminated lines.
std::string SerializeUpload(std::span<const RecombinedRecord> records);
std::vector<RecombinedRecord> ParseUpload(std::string_view text);

}  // namespace coavoid::filter
