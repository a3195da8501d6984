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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "coavoid/bytes.h"
#include "coavoid/geocell.h"
#include "coavoid/keysched.h"

namespace coavoid::devicelog {

inline constexpr int64_t kRetentionSeconds =
    keysched::kRetentionDays * keysched::kSecondsPerDay;
// Accepted clock skew, in intervals, between a sighting and the interval its
// identifier was derived for.
inline constexpr int kSkewToleranceIntervals = 1;

// One of the device's own broadcasts (Time || RPI).
struct BroadcastRecord {
  int64_t timestamp = 0;
  Key16 rpi{};

  bool operator==(const BroadcastRecord&) const = default;
};

// An identifier heard from another device, stamped with the receiver's own
// hidden location and the received signal strength.
struct ExchangeRecord {
  int64_t timestamp = 0;
  Key16 rpi{};
  geocell::CellDigest cell_digest;
  int rssi = 0;

  bool operator==(const ExchangeRecord&) const = default;
};

// Broadcast and exchange logs of one device. Records are kept in timestamp
// order and anything older than 14 days before the newest record is dropped.
// Existing records are never modified.
class DeviceLog {
 public:
  void RecordBroadcast(int64_t timestamp, const Key16& rpi);
  void RecordExchange(int64_t timestamp, const Key16& rpi,
                      const geocell::CellDigest& cell_digest, int rssi);

  // Drops records with timestamp < now - 14 days.
  void Prune(int64_t now);

  const std::vector<BroadcastRecord>& broadcasts() const { return broadcasts_; }
  const std::vector<ExchangeRecord>& exchanges() const { return exchanges_; }
  int64_t newest_timestamp() const { return newest_; }

  // Tab-separated text, one record per line, ordered by timestamp:
  //   EX <iso8601> <32-hex rpi> <64-hex cell digest> <rssi>
  //   BC <iso8601> <32-hex rpi>
  std::string Serialize() const;
  static DeviceLog Parse(std::string_view text);

  void WriteFile(const std::filesystem::path& path) const;
  static DeviceLog ReadFile(const std::filesystem::path& path);

 private:
  std::vector<BroadcastRecord> broadcasts_;
  std::vector<ExchangeRecord> exchanges_;
  int64_t newest_ = INT64_MIN;
};

std::string FormatLine(const BroadcastRecord& r);
std::string FormatLine(const ExchangeRecord& r);

// "2020-08-09T09:04:00Z" <-> UTC seconds.
std::string FormatIso8601(int64_t timestamp);
int64_t ParseIso8601(std::string_view text);

// Replay check: true iff the sighting's interval is within one interval of
// the interval the identifier claims. The integer form compares interval
// numbers within a day; the IntervalTime form also handles day boundaries.
bool ValidateTimestamp(const ExchangeRecord& record, int claimed_interval);
bool ValidateTimestamp(const ExchangeRecord& record,
                       keysched::IntervalTime claimed);

// Distance-based signal model used by the simulator:
// -40 - 25 log10(max(d, 0.5)) + noise, rounded to whole dBm.
int SyntheticRssi(double distance_m, double noise_db);

}  // namespace coavoid::devicelog
