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

#include "coavoid/finematch/coarse.h"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

namespace coavoid::finematch {

std::string_view CoarseClassName(CoarseClass c) {
  switch (c) {
    case CoarseClass::kHit: return "Hit";
    case CoarseClass::kWormholeSuspect: return "WormholeSuspect";
    case CoarseClass::kReplaySuspect: return "ReplaySuspect";
  }
  return "?";
}

std::vector<CoarseMatch> CoarseMatchRecords(
    std::span<const devicelog::ExchangeRecord> exchanges,
    std::span<const filter::RecombinedRecord> downloaded) {
  std::unordered_multimap<Key16, size_t, ArrayHash> by_rpi;
  by_rpi.reserve(exchanges.size());
  for (size_t i = 0; i < exchanges.size(); ++i) by_rpi.emplace(exchanges[i].rpi, i);
  std::vector<CoarseMatch> out;
  for (size_t j = 0; j < downloaded.size(); ++j) {
    const auto& rec = downloaded[j];
    auto [lo, hi] = by_rpi.equal_range(rec.rpi);
    for (auto it = lo; it != hi; ++it) {
      const auto& ex = exchanges[it->second];
      CoarseClass kind = CoarseClass::kHit;
      if (ex.cell_digest != rec.cell_digest) {
        kind = CoarseClass::kWormholeSuspect;
      } else if (!devicelog::ValidateTimestamp(ex, rec.coarse_time)) {
        kind = CoarseClass::kReplaySuspect;
      }
      out.push_back({it->second, j, kind});
    }
  }
  std::sort(out.begin(), out.end(), [](const CoarseMatch& a, const CoarseMatch& b) {
    return std::tie(a.exchange, a.record) < std::tie(b.exchange, b.record);
  });
  return out;
}

std::string LocationLogLine(const geocell::CellDigest& patient,
                            const geocell::CellDigest& user) {
  return fmt::format("Location Verification[1]: [INFO] [P] {} [U] {} [{}]",
                     ToHex(patient.digest), ToHex(user.digest),
                     patient == user ? "Correct" : "Wormhole Attack");
}

std::string FinalLogLine(const Decision& decision) {
  return fmt::format(
      "Location Verification[2]: [INFO] [Final] {} [{}]",
      mpz_get_d(decision.quantity.get_mpz_t()),
      decision.verdict == Verdict::kInside ? "Correct" : "Wormhole Attack");
}

std::string TimestampLogLine(keysched::IntervalTime patient,
                             keysched::IntervalTime user, bool valid) {
  return fmt::format("Timestamp Verification: [INFO] [P] {}:{} [U] {}:{} [{}]",
                     patient.day_index, patient.interval, user.day_index,
                     user.interval, valid ? "Correct" : "Replay Attack");
}

}  // namespace coavoid::finematch
