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

#include "coavoid/simharness/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "coavoid/error.h"
#include "coavoid/finematch/params.h"

namespace coavoid::simharness {

using nlohmann::json;

namespace {

void Check(bool ok, const std::string& what) {
  COAVOID_ENFORCE(ok, ErrorCode::kConfigInvalid, what);
}

// Reads j[key] into out when present and records the key as consumed.
template <typename T>
void Read(const json& j, const char* key, T& out, std::set<std::string>& seen) {
  seen.insert(key);
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    Throw(ErrorCode::kConfigInvalid, fmt::format("{}: {}", key, e.what()));
  }
}

void RejectUnknown(const json& j, const std::set<std::string>& seen,
                   const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    Check(seen.count(key) != 0, fmt::format("unknown key {}{}", where, key));
  }
}

AttackScenario ParseAttack(const json& j) {
  COAVOID_ENFORCE(j.is_object(), ErrorCode::kScenarioInvalid,
                  "attack entry must be an object");
  AttackScenario a;
  std::set<std::string> seen;
  std::string kind = std::string(AttackKindName(a.kind));
  try {
    Read(j, "kind", kind, seen);
    Read(j, "tap_place", a.tap_place, seen);
    Read(j, "emit_places", a.emit_places, seen);
    Read(j, "directional", a.directional, seen);
    Read(j, "delay_intervals", a.delay_intervals, seen);
    Read(j, "emit_distance_m", a.emit_distance_m, seen);
    RejectUnknown(j, seen, "attacks[].");
  } catch (const Error& e) {
    Throw(ErrorCode::kScenarioInvalid, e.what());
  }
  a.kind = ParseAttackKind(kind);
  return a;
}

json AttackToJson(const AttackScenario& a) {
  return {{"kind", AttackKindName(a.kind)},
          {"tap_place", a.tap_place},
          {"emit_places", a.emit_places},
          {"directional", a.directional},
          {"delay_intervals", a.delay_intervals},
          {"emit_distance_m", a.emit_distance_m}};
}

}  // namespace

std::string_view AttackKindName(AttackKind k) {
  return k == AttackKind::kWormhole ? "wormhole" : "replay";
}

AttackKind ParseAttackKind(std::string_view s) {
  if (s == "wormhole") return AttackKind::kWormhole;
  if (s == "replay") return AttackKind::kReplay;
  Throw(ErrorCode::kScenarioInvalid, fmt::format("unknown attack kind {}", s));
}

void ValidateConfig(const SimConfig& c) {
  Check(c.users >= 1, "users must be positive");
  Check(c.places >= 1, "places must be positive");
  Check(c.days >= 1, "days must be positive");
  Check(c.infection_rate >= 0 && c.infection_rate <= 1,
        "infection_rate must be in [0, 1]");
  for (double f : c.patient_fraction) {
    Check(f >= 0 && f <= 1, "patient_fraction entries must be in [0, 1]");
  }
  try {
    geocell::ValidateResolution(c.resolution);
    geocell::ValidatePoint(c.region.centroid);
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigInvalid, e.what());
  }
  Check(c.city_radius_m > 0, "city_radius_m must be positive");
  Check(c.start_day >= 0, "start_day must be non-negative");
  Check(c.visits_per_day >= 0, "visits_per_day must be non-negative");
  Check(c.max_visit_intervals >= 1, "max_visit_intervals must be positive");
  Check(c.first_active_interval >= 1 &&
            c.first_active_interval <= c.last_active_interval &&
            c.last_active_interval <= 96,
        "active intervals must satisfy 1 <= first <= last <= 96");
  Check(c.contacts_per_visit >= 0, "contacts_per_visit must be non-negative");
  Check(c.beacon_continue >= 0 && c.beacon_continue < 1,
        "beacon_continue must be in [0, 1)");
  Check(c.place_radius_m >= 0, "place_radius_m must be non-negative");
  Check(c.rssi_noise_db >= 0, "rssi_noise_db must be non-negative");
  Check(c.contact_radius_m >= 1, "contact_radius_m must be positive");
  Check(c.param_set == "default" || c.param_set == "toy",
        "param_set must be default or toy");
  Check(c.suite == "ed25519" || c.suite == "bls-typea",
        "suite must be ed25519 or bls-typea");
  try {
    riskscore::ValidateConfig(c.risk);
  } catch (const Error& e) {
    Throw(ErrorCode::kConfigInvalid, e.what());
  }
  Check(c.transmission_level >= 0 && c.transmission_level <= 8,
        "transmission_level must be in 0..8");

  // The fixed-point frame must hold the whole city plus a contact radius.
  const auto& bits = c.param_set == "toy" ? finematch::kToyBitLengths
                                          : finematch::kDefaultBitLengths;
  const double half_span = std::ldexp(1.0, bits.coord_bits - 1);
  Check(c.city_radius_m + c.place_radius_m + c.contact_radius_m + 2 < half_span,
        fmt::format("city does not fit the {}-bit coordinate domain",
                    bits.coord_bits));

  for (const auto& a : c.attacks) {
    auto in_range = [&](int p) { return p >= 0 && p < c.places; };
    COAVOID_ENFORCE(in_range(a.tap_place), ErrorCode::kScenarioInvalid,
                    "tap_place out of range");
    COAVOID_ENFORCE(!a.emit_places.empty(), ErrorCode::kScenarioInvalid,
                    "no emit places");
    for (int p : a.emit_places) {
      COAVOID_ENFORCE(in_range(p), ErrorCode::kScenarioInvalid,
                      "emit place out of range");
    }
    COAVOID_ENFORCE(a.kind != AttackKind::kReplay || a.delay_intervals > 1,
                    ErrorCode::kScenarioInvalid,
                    "replay delay must exceed the one-interval skew tolerance");
    COAVOID_ENFORCE(a.emit_distance_m >= 0, ErrorCode::kScenarioInvalid,
                    "emit_distance_m must be non-negative");
  }
}

SimConfig ParseConfig(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    Throw(ErrorCode::kConfigInvalid, fmt::format("config: {}", e.what()));
  }
  Check(j.is_object(), "config must be a JSON object");
  SimConfig c;
  std::set<std::string> seen;
  Read(j, "users", c.users, seen);
  Read(j, "places", c.places, seen);
  Read(j, "days", c.days, seen);
  Read(j, "infection_rate", c.infection_rate, seen);
  Read(j, "seed", c.seed, seen);
  Read(j, "patient_fraction", c.patient_fraction, seen);
  Read(j, "resolution", c.resolution, seen);
  Read(j, "city_radius_m", c.city_radius_m, seen);
  Read(j, "start_day", c.start_day, seen);
  Read(j, "visits_per_day", c.visits_per_day, seen);
  Read(j, "max_visit_intervals", c.max_visit_intervals, seen);
  Read(j, "first_active_interval", c.first_active_interval, seen);
  Read(j, "last_active_interval", c.last_active_interval, seen);
  Read(j, "contacts_per_visit", c.contacts_per_visit, seen);
  Read(j, "beacon_continue", c.beacon_continue, seen);
  Read(j, "place_radius_m", c.place_radius_m, seen);
  Read(j, "rssi_noise_db", c.rssi_noise_db, seen);
  Read(j, "contact_radius_m", c.contact_radius_m, seen);
  Read(j, "param_set", c.param_set, seen);
  Read(j, "suite", c.suite, seen);
  Read(j, "transmission_level", c.transmission_level, seen);

  seen.insert("region");
  if (j.contains("region")) {
    const json& r = j["region"];
    std::set<std::string> rs;
    Read(r, "lat", c.region.centroid.lat, rs);
    Read(r, "lon", c.region.centroid.lon, rs);
    Read(r, "extent_deg", c.region.extent_deg, rs);
    RejectUnknown(r, rs, "region.");
  }
  seen.insert("risk");
  if (j.contains("risk")) {
    const json& r = j["risk"];
    std::set<std::string> rs;
    Read(r, "duration_bucket_min", c.risk.duration_bucket_min, rs);
    Read(r, "warn_threshold", c.risk.warn_threshold, rs);
    Read(r, "tx_power_dbm", c.risk.tx_power_dbm, rs);
    rs.insert("attenuation_bands");
    if (r.contains("attenuation_bands")) {
      const json& b = r["attenuation_bands"];
      std::set<std::string> bs;
      Read(b, "start_db", c.risk.attenuation_start_db, bs);
      Read(b, "width_db", c.risk.attenuation_band_db, bs);
      RejectUnknown(b, bs, "risk.attenuation_bands.");
    }
    RejectUnknown(r, rs, "risk.");
  }
  seen.insert("attacks");
  if (j.contains("attacks")) {
    COAVOID_ENFORCE(j["attacks"].is_array(), ErrorCode::kScenarioInvalid,
                    "attacks must be an array");
    for (const auto& a : j["attacks"]) c.attacks.push_back(ParseAttack(a));
  }
  RejectUnknown(j, seen, "");
  ValidateConfig(c);
  return c;
}

SimConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  COAVOID_ENFORCE(in.good(), ErrorCode::kIoFailure,
                  fmt::format("cannot read {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::string ConfigToJson(const SimConfig& c) {
  json attacks = json::array();
  for (const auto& a : c.attacks) attacks.push_back(AttackToJson(a));
  json j = {
      {"users", c.users},
      {"places", c.places},
      {"days", c.days},
      {"infection_rate", c.infection_rate},
      {"seed", c.seed},
      {"patient_fraction", c.patient_fraction},
      {"resolution", c.resolution},
      {"region",
       {{"lat", c.region.centroid.lat},
        {"lon", c.region.centroid.lon},
        {"extent_deg", c.region.extent_deg}}},
      {"city_radius_m", c.city_radius_m},
      {"start_day", c.start_day},
      {"visits_per_day", c.visits_per_day},
      {"max_visit_intervals", c.max_visit_intervals},
      {"first_active_interval", c.first_active_interval},
      {"last_active_interval", c.last_active_interval},
      {"contacts_per_visit", c.contacts_per_visit},
      {"beacon_continue", c.beacon_continue},
      {"place_radius_m", c.place_radius_m},
      {"rssi_noise_db", c.rssi_noise_db},
      {"contact_radius_m", c.contact_radius_m},
      {"param_set", c.param_set},
      {"suite", c.suite},
      {"risk",
       {{"duration_bucket_min", c.risk.duration_bucket_min},
        {"warn_threshold", c.risk.warn_threshold},
        {"tx_power_dbm", c.risk.tx_power_dbm},
        {"attenuation_bands",
         {{"start_db", c.risk.attenuation_start_db},
          {"width_db", c.risk.attenuation_band_db}}}}},
      {"transmission_level", c.transmission_level},
      {"attacks", attacks},
  };
  return j.dump(2);
}

}  // namespace coavoid::simharness
