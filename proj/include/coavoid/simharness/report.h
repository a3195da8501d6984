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
#include <vector>

#include "coavoid/simharness/config.h"

namespace coavoid::simharness {

enum class Strategy { kCoAvoid, kBaseline };
std::string_view StrategyName(Strategy s);

// One simulated day. Contacts are distinct (user, patient) pairs for the
// patients whose uploads were published that day.
struct DayMetrics {
  int day = 0;
  int new_patients = 0;
  int true_contacts = 0;
  int detected_contacts = 0;
  // Detected pairs that are not in the ground-truth ledger.
  int false_contacts = 0;
  // Ground-truth pairs that were not detected.
  int missed_contacts = 0;
  // Uploads under the report's strategy.
  int64_t upload_records = 0;
  int64_t upload_bytes = 0;
  // Both strategies are always measured so the ratio is available per run.
  int64_t coavoid_upload_bytes = 0;
  int64_t baseline_upload_bytes = 0;
  // Records live on the server after the day's publish.
  int64_t server_records = 0;
  int64_t coarse_hits = 0;
  int64_t wormhole_suspects = 0;
  int64_t replay_suspects = 0;
  int64_t fine_sessions = 0;
  int64_t fine_inside = 0;
  int64_t warnings = 0;
  int healthy = 0;
  int suspected = 0;
  int sick = 0;

  bool operator==(const DayMetrics&) const = default;
};

// Wall-clock measurements. Hardware-dependent, so kept apart from the
// deterministic part of the report.
struct Timings {
  // Per-patient filter+recombine time.
  std::vector<double> filter_seconds;
  // Per-user download-and-verify time, one entry per (day, user) that had
  // anything to verify.
  std::vector<double> verify_seconds;
  double total_seconds = 0;
};

struct MetricsReport {
  Strategy strategy = Strategy::kCoAvoid;
  uint64_t seed = 0;
  int users = 0;
  std::vector<DayMetrics> days;
  Timings timings;

  // Everything except timings.
  bool SameOutcome(const MetricsReport& other) const {
    return strategy == other.strategy && seed == other.seed &&
           users == other.users && days == other.days;
  }
};

struct DayTotals {
  int64_t true_contacts = 0;
  int64_t detected_contacts = 0;
  int64_t false_contacts = 0;
  int64_t missed_contacts = 0;
  int64_t upload_bytes = 0;
  int64_t coavoid_upload_bytes = 0;
  int64_t baseline_upload_bytes = 0;
  int64_t wormhole_suspects = 0;
  int64_t replay_suspects = 0;
  int64_t fine_sessions = 0;
  int64_t fine_inside = 0;
};
DayTotals Totals(const MetricsReport& report);

// coavoid_upload_bytes / baseline_upload_bytes over the whole run, 0 when
// nothing was uploaded.
double UploadRatio(const MetricsReport& report);

struct AttackReport {
  AttackScenario scenario;
  int64_t injections = 0;
  int64_t wormhole_suspects = 0;
  int64_t replay_suspects = 0;
  // Fine-stage sessions that involved an injected identifier, and how many
  // of them ended outside the radius.
  int64_t fine_sessions = 0;
  int64_t fine_rejected = 0;
  int64_t false_contacts = 0;
  std::vector<std::string> log_lines;
  MetricsReport metrics;
};

struct BenchReport {
  int users = 0;
  int days = 0;
  int sampled_users = 0;
  int64_t coavoid_records = 0;
  int64_t baseline_records = 0;
  int64_t coavoid_dataset_bytes = 0;
  int64_t baseline_dataset_bytes = 0;
  int64_t fine_sessions = 0;
  double coavoid_seconds_per_user = 0;
  double baseline_seconds_per_user = 0;
  double ratio = 0;
};

// CSV text. Every file starts with a header row.
std::string DailyCsv(const MetricsReport& report);
std::string UploadsCsv(const MetricsReport& report);
std::string TimingsCsv(const MetricsReport& report);
std::string SummaryJson(const MetricsReport& report);
std::string AttackJson(const AttackReport& report);
std::string BenchJson(const BenchReport& report);

// Writes daily.csv, uploads.csv, timings.csv and summary.json into dir,
// creating it if needed. Throws kIoFailure.
void EmitMetrics(const MetricsReport& report, const std::filesystem::path& dir);
// The above plus attack.json and attack_log.txt.
void EmitAttack(const AttackReport& report, const std::filesystem::path& dir);

}  // namespace coavoid::simharness
