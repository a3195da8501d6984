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

#include "coavoid/keysched.h"

#include <string>

#include "coavoid/error.h"

namespace coavoid::keysched {

namespace {

constexpr std::string_view kRpikInfo = "EN-RPIK";
constexpr std::string_view kRpiInfo = "EN-RPI";

void CheckInterval(int interval) {
  COAVOID_ENFORCE(interval >= 1 && interval <= kIntervalsPerDay,
                  ErrorCode::kIntervalOutOfRange,
                  "interval " + std::to_string(interval) +
                      " outside [1, 96]");
}

int64_t FloorDiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

IntervalTime IntervalTime::FromAbsolute(int64_t absolute) {
  int64_t day = FloorDiv(absolute, kIntervalsPerDay);
  return {day, static_cast<int>(absolute - day * kIntervalsPerDay) + 1};
}

DailyTracingKey GenerateDailyTracingKey(int64_t day_index, RandomSource& rng) {
  return {day_index, rng.Array<16>()};
}

Key16 DeriveRpik(const DailyTracingKey& dtk) {
  // The salt argument of the derivation is empty, so the hash input is the
  // key followed directly by the info string.
  Digest32 h = Sha256({ByteSpan(dtk.key), AsBytes(kRpikInfo)});
  Key16 rpik{};
  std::copy_n(h.begin(), rpik.size(), rpik.begin());
  return rpik;
}

Key16 PaddedData(int interval) {
  CheckInterval(interval);
  Key16 block{};
  std::copy(kRpiInfo.begin(), kRpiInfo.end(), block.begin());
  // bytes 6..11 stay zero
  auto v = static_cast<uint32_t>(interval);
  block[12] = static_cast<uint8_t>(v >> 24);
  block[13] = static_cast<uint8_t>(v >> 16);
  block[14] = static_cast<uint8_t>(v >> 8);
  block[15] = static_cast<uint8_t>(v);
  return block;
}

RollingProximityIdentifier DeriveRpi(const Key16& rpik, int interval,
                                     int64_t day_index) {
  return {Aes128EncryptBlock(rpik, PaddedData(interval)), interval, day_index};
}

std::array<Key16, kIntervalsPerDay> DeriveDayRpis(const DailyTracingKey& dtk) {
  Aes128 cipher(DeriveRpik(dtk));
  std::array<Key16, kIntervalsPerDay> out{};
  for (int i = 1; i <= kIntervalsPerDay; ++i) {
    out[i - 1] = cipher.Encrypt(PaddedData(i));
  }
  return out;
}

IntervalTime IntervalOf(int64_t timestamp) {
  int64_t day = FloorDiv(timestamp, kSecondsPerDay);
  int64_t within = timestamp - day * kSecondsPerDay;
  return {day, static_cast<int>(within / kIntervalSeconds) + 1};
}

int64_t IntervalStart(IntervalTime t) {
  return t.day_index * kSecondsPerDay + (t.interval - 1) * kIntervalSeconds;
}

const DailyTracingKey& KeyStore::KeyForDay(int64_t day_index,
                                           RandomSource& rng) {
  auto it = keys_.find(day_index);
  if (it == keys_.end()) {
    it = keys_.emplace(day_index, GenerateDailyTracingKey(day_index, rng))
             .first;
  }
  return it->second;
}

std::optional<DailyTracingKey> KeyStore::Find(int64_t day_index) const {
  auto it = keys_.find(day_index);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

void KeyStore::Purge(int64_t current_day) {
  keys_.erase(keys_.begin(),
              keys_.lower_bound(current_day - kRetentionDays));
}

}  // namespace coavoid::keysched
