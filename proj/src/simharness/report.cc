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

#include "coavoid/simharness/report.h"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "coavoid/error.h"

namespace coavoid::simharness {

using nlohmann::json;

namespace {

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  COAVOID_ENFORCE(out.good(), ErrorCode::kIoFailure,
                  fmt::format("cannot write {}", path.string()));
}

void MakeDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  COAVOID_ENFORCE(!ec, ErrorCode::kIoFailure,
                  fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

json TotalsJson(const DayTotals& t) {
  return {{"true_contacts", t.true_contacts},
          {"detected_contacts", t.detected_contacts},
          {"false_contacts", t.false_contacts},
          {"missed_contacts", t.missed_contacts},
          {"upload_bytes", t.upload_bytes},
          {"coavoid_upload_bytes", t.coavoid_upload_bytes},
          {"baseline_upload_bytes", t.baseline_upload_bytes},
          {"wormhole_suspects", t.wormhole_suspects},
          {"replay_suspects", t.replay_suspects},
          {"fine_sessions", t.fine_sessions},
          {"fine_inside", t.fine_inside}};
}

}  // namespace

std::string_view StrategyName(Strategy s) {
  return s == Strategy::kCoAvoid ? "coavoid" : "baseline";
}

DayTotals Totals(const MetricsReport& report) {
  DayTotals t;
  for (const auto& d : report.days) {
    t.true_contacts += d.true_contacts;
    t.detected_contacts += d.detected_contacts;
    t.false_contacts += d.false_contacts;
    t.missed_contacts += d.missed_contacts;
    t.upload_bytes += d.upload_bytes;
    t.coavoid_upload_bytes += d.coavoid_upload_bytes;
    t.baseline_upload_bytes += d.baseline_upload_bytes;
    t.wormhole_suspects += d.wormhole_suspects;
    t.replay_suspects += d.replay_suspects;
    t.fine_sessions += d.fine_sessions;
    t.fine_inside += d.fine_inside;
  }
  return t;
}

double UploadRatio(const MetricsReport& report) {
  auto t = Totals(report);
  return Ratio(t.coavoid_upload_bytes, t.baseline_upload_bytes);
}

std::string DailyCsv(const MetricsReport& report) {
  std::string out =
      "day,new_patients,true_contacts,detected_contacts,false_contacts,"
      "missed_contacts,coarse_hits,wormhole_suspects,replay_suspects,"
      "fine_sessions,fine_inside,warnings,healthy,suspected,sick,"
      "server_records\n";
  for (const auto& d : report.days) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", d.day,
                       d.new_patients, d.true_contacts, d.detected_contacts,
                       d.false_contacts, d.missed_contacts, d.coarse_hits,
                       d.wormhole_suspects, d.replay_suspects, d.fine_sessions,
                       d.fine_inside, d.warnings, d.healthy, d.suspected,
                       d.sick, d.server_records);
  }
  return out;
}

std::string UploadsCsv(const MetricsReport& report) {
  std::string out =
      "day,strategy,upload_records,upload_bytes,coavoid_upload_bytes,"
      "baseline_upload_bytes,upload_ratio\n";
  for (const auto& d : report.days) {
    out += fmt::format("{},{},{},{},{},{},{:.6f}\n", d.day,
                       StrategyName(report.strategy), d.upload_records,
                       d.upload_bytes, d.coavoid_upload_bytes,
                       d.baseline_upload_bytes,
                       Ratio(d.coavoid_upload_bytes, d.baseline_upload_bytes));
  }
  return out;
}

std::string TimingsCsv(const MetricsReport& report) {
  std::string out = "kind,index,seconds\n";
  for (size_t i = 0; i < report.timings.filter_seconds.size(); ++i) {
    out += fmt::format("filter,{},{:.9f}\n", i, report.timings.filter_seconds[i]);
  }
  for (size_t i = 0; i < report.timings.verify_seconds.size(); ++i) {
    out += fmt::format("verify,{},{:.9f}\n", i, report.timings.verify_seconds[i]);
  }
  return out;
}

std::string SummaryJson(const MetricsReport& report) {
  const auto t = Totals(report);
  json j = {{"strategy", StrategyName(report.strategy)},
            {"seed", report.seed},
            {"users", report.users},
            {"days", report.days.size()},
            {"totals", TotalsJson(t)},
            {"upload_ratio", UploadRatio(report)}};
  return j.dump(2) + "\n";
}

std::string AttackJson(const AttackReport& r) {
  json j = {{"kind", AttackKindName(r.scenario.kind)},
            {"tap_place", r.scenario.tap_place},
            {"emit_places", r.scenario.emit_places},
            {"directional", r.scenario.directional},
            {"injections", r.injections},
            {"wormhole_suspects", r.wormhole_suspects},
            {"replay_suspects", r.replay_suspects},
            {"fine_sessions", r.fine_sessions},
            {"fine_rejected", r.fine_rejected},
            {"false_contacts", r.false_contacts}};
  return j.dump(2) + "\n";
}

std::string BenchJson(const BenchReport& r) {
  json j = {{"users", r.users},
            {"days", r.days},
            {"sampled_users", r.sampled_users},
            {"coavoid_records", r.coavoid_records},
            {"baseline_records", r.baseline_records},
            {"coavoid_dataset_bytes", r.coavoid_dataset_bytes},
            {"baseline_dataset_bytes", r.baseline_dataset_bytes},
            {"fine_sessions", r.fine_sessions},
            {"coavoid_seconds_per_user", r.coavoid_seconds_per_user},
            {"baseline_seconds_per_user", r.baseline_seconds_per_user},
            {"ratio", r.ratio}};
  return j.dump(2) + "\n";
}

void EmitMetrics(const MetricsReport& report, const std::filesystem::path& dir) {
  MakeDir(dir);
  WriteText(dir / "daily.csv", DailyCsv(report));
  WriteText(dir / "uploads.csv", UploadsCsv(report));
  WriteText(dir / "timings.csv", TimingsCsv(report));
  WriteText(dir / "summary.json", SummaryJson(report));
}

void EmitAttack(const AttackReport& report, const std::filesystem::path& dir) {
  EmitMetrics(report.metrics, dir);
  WriteText(dir / "attack.json", AttackJson(report));
  std::string log;
  for (const auto& line : report.log_lines) log += line + "\n";
  WriteText(dir / "attack_log.txt", log);
}

}  // namespace coavoid::simharness
