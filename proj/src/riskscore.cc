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

#include "coavoid/riskscore.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coavoid/error.h"

namespace coavoid::riskscore {

namespace {

int Clamp(double v) {
  return static_cast<int>(std::clamp(std::floor(v), 0.0, double{kMaxLevel}));
}

void CheckLevel(int v, const char* name) {
  COAVOID_ENFORCE(v >= 0 && v <= kMaxLevel, ErrorCode::kLevelOutOfRange,
                  fmt::format("{} = {} outside 0..8", name, v));
}

}  // namespace

void ValidateConfig(const RiskConfig& config) {
  COAVOID_ENFORCE(config.duration_bucket_min > 0, ErrorCode::kConfigInvalid,
                  "risk.duration_bucket_min must be positive");
  COAVOID_ENFORCE(config.warn_threshold >= 0, ErrorCode::kConfigInvalid,
                  "risk.warn_threshold must be non-negative");
  COAVOID_ENFORCE(config.attenuation_band_db > 0, ErrorCode::kConfigInvalid,
                  "attenuation band width must be positive");
}

int RiskScore(const RiskFactors& f) {
  CheckLevel(f.trv, "trv");
  CheckLevel(f.durv, "durv");
  CheckLevel(f.darv, "darv");
  CheckLevel(f.arv, "arv");
  return f.trv * f.durv * f.darv * f.arv;
}

int DurationLevel(double cumulative_minutes, const RiskConfig& config) {
  return Clamp(cumulative_minutes / config.duration_bucket_min);
}

int DaysSinceLevel(int days_since) {
  return Clamp(kMaxLevel - std::floor(days_since / 2.0));
}

int AttenuationLevel(double attenuation_db, const RiskConfig& config) {
  const double band = std::floor((attenuation_db - config.attenuation_start_db) /
                                 config.attenuation_band_db);
  return kMaxLevel - Clamp(band);
}

RiskFactors DeriveFactors(std::span<const Exposure> hits, int days_since,
                          int trv, const RiskConfig& config) {
  COAVOID_ENFORCE(!hits.empty(), ErrorCode::kNoHits, "no confirmed hits");
  CheckLevel(trv, "trv");
  ValidateConfig(config);
  double minutes = 0.0;
  double weighted = 0.0;
  for (const auto& h : hits) {
    minutes += h.minutes;
    weighted += h.minutes * (config.tx_power_dbm - h.rssi);
  }
  // Zero-length hits carry no duration weight; fall back to a plain mean.
  double attenuation = 0.0;
  if (minutes > 0) {
    attenuation = weighted / minutes;
  } else {
    for (const auto& h : hits) attenuation += config.tx_power_dbm - h.rssi;
    attenuation /= static_cast<double>(hits.size());
  }
  return {trv, DurationLevel(minutes, config), DaysSinceLevel(days_since),
          AttenuationLevel(attenuation, config)};
}

bool ShouldWarn(int score, const RiskConfig& config) {
  return score >= config.warn_threshold;
}

}  // namespace coavoid::riskscore
