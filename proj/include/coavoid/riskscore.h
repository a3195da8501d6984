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

#include <span>

namespace coavoid::riskscore {

inline constexpr int kMaxLevel = 8;

// Transmission, duration, days-since-contact and attenuation levels, each
// 0..8.
struct RiskFactors {
  int trv = 0;
  int durv = 0;
  int darv = 0;
  int arv = 0;

  bool operator==(const RiskFactors&) const = default;
};

struct RiskConfig {
  int duration_bucket_min = 5;
  int warn_threshold = 64;
  // Attenuation bands: [start, start + width) is the strongest band.
  double attenuation_start_db = 40.0;
  double attenuation_band_db = 8.0;
  // Attenuation = tx_power - rssi.
  double tx_power_dbm = 0.0;
};

// Throws kConfigInvalid for non-positive widths or a negative threshold.
void ValidateConfig(const RiskConfig& config);

// Product of the four levels, 0..4096. Throws kLevelOutOfRange.
int RiskScore(const RiskFactors& f);

// One confirmed contact: how long it lasted and how strong it was.
struct Exposure {
  double minutes = 0.0;
  int rssi = 0;
};

int DurationLevel(double cumulative_minutes, const RiskConfig& config);
int DaysSinceLevel(int days_since);
// 8 for the strongest band, down to 0.
int AttenuationLevel(double attenuation_db, const RiskConfig& config);

// Throws kNoHits for an empty list, kLevelOutOfRange for trv outside 0..8.
RiskFactors DeriveFactors(std::span<const Exposure> hits, int days_since,
                          int trv, const RiskConfig& config = {});

bool ShouldWarn(int score, const RiskConfig& config = {});

}  // namespace coavoid::riskscore
