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

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>

#include "coavoid/bytes.h"
#include "coavoid/crypto.h"

// Daily tracing keys and the rolling proximity identifiers derived from them:
//
//   RPIK = SHA-256(DTK || "EN-RPIK")[0..16)
//   RPI  = AES-128(RPIK, "EN-RPI" || 0x000000000000 || be32(interval))
//
// Intervals are 15-minute slots numbered 1..96 within a UTC day.
namespace coavoid::keysched {

inline constexpr int kIntervalsPerDay = 96;
inline constexpr int64_t kSecondsPerDay = 86400;
inline constexpr int64_t kIntervalSeconds = 900;
inline constexpr int kRetentionDays = 14;

struct DailyTracingKey {
  int64_t day_index = 0;
  Key16 key{};

  bool operator==(const DailyTracingKey&) const = default;
};

struct RollingProximityIdentifier {
  Key16 rpi{};
  int interval = 1;
  int64_t day_index = 0;

  bool operator==(const RollingProximityIdentifier&) const = default;
};

// A (day, interval) pair; totally ordered in time.
struct IntervalTime {
  int64_t day_index = 0;
  int interval = 1;

  auto operator<=>(const IntervalTime&) const = default;

  // Intervals elapsed since the epoch, counting from zero.
  int64_t Absolute() const { return day_index * kIntervalsPerDay + interval - 1; }
  static IntervalTime FromAbsolute(int64_t absolute);
};

DailyTracingKey GenerateDailyTracingKey(int64_t day_index, RandomSource& rng);

Key16 DeriveRpik(const DailyTracingKey& dtk);

// The 16-byte AES plaintext for an interval. Throws kIntervalOutOfRange.
Key16 PaddedData(int interval);

// Throws kIntervalOutOfRange when interval is outside [1, 96].
RollingProximityIdentifier DeriveRpi(const Key16& rpik, int interval,
                                     int64_t day_index = 0);

// All 96 identifiers of one day, index i holding interval i + 1.
std::array<Key16, kIntervalsPerDay> DeriveDayRpis(const DailyTracingKey& dtk);

IntervalTime IntervalOf(int64_t timestamp);

// First second of the interval.
int64_t IntervalStart(IntervalTime t);

// Per-device key material. Holds at most one DTK per day and forgets keys
// older than the retention window. Single writer.
class KeyStore {
 public:
  // Returns the key for day_index, generating it on first use.
  const DailyTracingKey& KeyForDay(int64_t day_index, RandomSource& rng);

  std::optional<DailyTracingKey> Find(int64_t day_index) const;

  // Drops every key with current_day - day_index > kRetentionDays.
  void Purge(int64_t current_day);

  size_t size() const { return keys_.size(); }
  const std::map<int64_t, DailyTracingKey>& keys() const { return keys_; }

 private:
  std::map<int64_t, DailyTracingKey> keys_;
};

}  // namespace coavoid::keysched
