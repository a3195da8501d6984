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

#include "coavoid/devicelog.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coavoid/error.h"

namespace coavoid::devicelog {

namespace {

template <typename Record>
void InsertOrdered(std::vector<Record>& records, Record r) {
  if (records.empty() || records.back().timestamp <= r.timestamp) {
    records.push_back(std::move(r));
    return;
  }
  auto pos = std::upper_bound(
      records.begin(), records.end(), r.timestamp,
      [](int64_t ts, const Record& x) { return ts < x.timestamp; });
  records.insert(pos, std::move(r));
}

template <typename Record>
void DropBefore(std::vector<Record>& records, int64_t cutoff) {
  auto keep = std::lower_bound(
      records.begin(), records.end(), cutoff,
      [](const Record& x, int64_t ts) { return x.timestamp < ts; });
  records.erase(records.begin(), keep);
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

void DeviceLog::RecordBroadcast(int64_t timestamp, const Key16& rpi) {
  InsertOrdered(broadcasts_, BroadcastRecord{timestamp, rpi});
  Prune(std::max(newest_, timestamp));
}

void DeviceLog::RecordExchange(int64_t timestamp, const Key16& rpi,
                               const geocell::CellDigest& cell_digest,
                               int rssi) {
  InsertOrdered(exchanges_, ExchangeRecord{timestamp, rpi, cell_digest, rssi});
  Prune(std::max(newest_, timestamp));
}

void DeviceLog::Prune(int64_t now) {
  newest_ = std::max(newest_, now);
  DropBefore(broadcasts_, newest_ - kRetentionSeconds);
  DropBefore(exchanges_, newest_ - kRetentionSeconds);
}

std::string FormatLine(const BroadcastRecord& r) {
  return "BC\t" + FormatIso8601(r.timestamp) + "\t" + ToHex(r.rpi);
}

std::string FormatLine(const ExchangeRecord& r) {
  return "EX\t" + FormatIso8601(r.timestamp) + "\t" + ToHex(r.rpi) + "\t" +
         ToHex(r.cell_digest.digest) + "\t" + std::to_string(r.rssi);
}

std::string DeviceLog::Serialize() const {
  std::string out;
  size_t b = 0, e = 0;
  // Merge by timestamp; exchanges first on ties.
  while (b < broadcasts_.size() || e < exchanges_.size()) {
    bool take_exchange =
        b == broadcasts_.size() ||
        (e < exchanges_.size() &&
         exchanges_[e].timestamp <= broadcasts_[b].timestamp);
    out += take_exchange ? FormatLine(exchanges_[e++])
                         : FormatLine(broadcasts_[b++]);
    out += '\n';
  }
  return out;
}

DeviceLog DeviceLog::Parse(std::string_view text) {
  DeviceLog log;
  size_t line_no = 0;
  while (!text.empty()) {
    size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    auto where = " at line " + std::to_string(line_no);
    if (f[0] == "BC" && f.size() == 3) {
      log.RecordBroadcast(ParseIso8601(f[1]), FixedFromHex<16>(f[2]));
    } else if (f[0] == "EX" && f.size() == 5) {
      int rssi = 0;
      try {
        size_t used = 0;
        rssi = std::stoi(std::string(f[4]), &used);
        COAVOID_ENFORCE(used == f[4].size(), ErrorCode::kParseError,
                        "bad rssi" + where);
      } catch (const std::logic_error&) {
        Throw(ErrorCode::kParseError, "bad rssi" + where);
      }
      log.RecordExchange(ParseIso8601(f[1]), FixedFromHex<16>(f[2]),
                         {FixedFromHex<32>(f[3])}, rssi);
    } else {
      Throw(ErrorCode::kParseError, "unrecognised record" + where);
    }
  }
  return log;
}

void DeviceLog::WriteFile(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << Serialize();
  COAVOID_ENFORCE(out.good(), ErrorCode::kIoFailure,
                  "cannot write " + path.string());
}

DeviceLog DeviceLog::ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  COAVOID_ENFORCE(in.good(), ErrorCode::kIoFailure,
                  "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::string FormatIso8601(int64_t timestamp) {
  using namespace std::chrono;
  sys_seconds t{seconds{timestamp}};
  auto day = floor<days>(t);
  year_month_day ymd{day};
  hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

int64_t ParseIso8601(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  std::string copy(text);
  int n = std::sscanf(copy.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d,
                      &h, &mi, &s, &tail);
  year_month_day ymd{year{y}, month{mo}, day{d}};
  COAVOID_ENFORCE(n == 7 && tail == 'Z' && copy.size() == 20 && ymd.ok() &&
                      h < 24 && mi < 60 && s < 60,
                  ErrorCode::kParseError,
                  "bad ISO-8601 timestamp '" + copy + "'");
  auto t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return t.time_since_epoch().count();
}

bool ValidateTimestamp(const ExchangeRecord& record, int claimed_interval) {
  int seen = keysched::IntervalOf(record.timestamp).interval;
  return std::abs(seen - claimed_interval) <= kSkewToleranceIntervals;
}

bool ValidateTimestamp(const ExchangeRecord& record,
                       keysched::IntervalTime claimed) {
  int64_t seen = keysched::IntervalOf(record.timestamp).Absolute();
  int64_t diff = seen - claimed.Absolute();
  return diff >= -kSkewToleranceIntervals && diff <= kSkewToleranceIntervals;
}

int SyntheticRssi(double distance_m, double noise_db) {
  return static_cast<int>(std::lround(
      -40.0 - 25.0 * std::log10(std::max(distance_m, 0.5)) + noise_db));
}

}  // namespace coavoid::devicelog
