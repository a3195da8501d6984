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

#include "coavoid/geocell.h"
#include "coavoid/riskscore.h"

namespace coavoid::simharness {

enum class AttackKind { kWormhole, kReplay };

std::string_view AttackKindName(AttackKind k);
// Throws kScenarioInvalid.
AttackKind ParseAttackKind(std::string_view s);

// An attacker that listens at one place and re-emits what it hears.
struct AttackScenario {
  AttackKind kind = AttackKind::kWormhole;
  int tap_place = 0;
  std::vector<int> emit_places = {1};
  // Only emit to devices at least the contact radius away from the device
  // whose identifier is being relayed. Required when an emit place shares
  // the tap place's cell.
  bool directional = false;
  // Replay only: how many intervals after capture the identifier is re-sent.
  int delay_intervals = 8;
  double emit_distance_m = 5.0;
};

struct SimConfig {
  int users = 1000;
  int places = 50;
  int days = 14;
  double infection_rate = 1.0;
  uint64_t seed = 42;
  // Fraction of the population diagnosed by outside testing on day i.
  std::vector<double> patient_fraction = {0.01};
  int resolution = geocell::kDefaultResolution;
  geocell::RegionConfig region;
  double city_radius_m = 15000.0;
  // First simulated UTC day, as days since 1970-01-01 (2026-03-01).
  int64_t start_day = 20513;

  // Contact micro-model.
  double visits_per_day = 2.0;
  int max_visit_intervals = 2;
  int first_active_interval = 29;  // 07:00
  int last_active_interval = 88;   // 22:00
  double contacts_per_visit = 2.0;
  // Probability that a beacon exchange continues for another 2 minutes.
  double beacon_continue = 0.5;
  double place_radius_m = 15.0;
  double rssi_noise_db = 2.0;

  // Fine-grained stage.
  int64_t contact_radius_m = 10;
  std::string param_set = "default";  // or "toy"
  std::string suite = "ed25519";      // or "bls-typea"

  riskscore::RiskConfig risk;
  int transmission_level = 5;

  std::vector<AttackScenario> attacks;
};

// Throws kConfigInvalid (or kScenarioInvalid for a bad attack entry).
void ValidateConfig(const SimConfig& config);

// JSON object with the field names above (snake_case). Missing keys keep
// their defaults; unknown keys are rejected. Risk settings live under
// "risk": {"duration_bucket_min", "warn_threshold",
// "attenuation_bands": {"start_db", "width_db"}, "tx_power_dbm"}.
SimConfig ParseConfig(std::string_view json_text);
SimConfig LoadConfig(const std::filesystem::path& path);
std::string ConfigToJson(const SimConfig& config);

}  // namespace coavoid::simharness
