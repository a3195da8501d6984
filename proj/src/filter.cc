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

#include "coavoid/filter.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <tuple>

#include "coavoid/error.h"

namespace coavoid::filter {

namespace {

int64_t ParseInt(std::string_view s, std::string_view what) {
  int64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  COAVOID_ENFORCE(ec == std::errc() && end == s.data() + s.size() && !s.empty(),
                  ErrorCode::kParseError,
                  "bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

bool UploadOrder(const RecombinedRecord& a, const RecombinedRecord& b) {
  return std::tie(a.coarse_time, a.cell_digest, a.rpi) <
         std::tie(b.coarse_time, b.cell_digest, b.rpi);
}

std::vector<RecombinedRecord> FilterAndRecombine(
    std::span<const devicelog::ExchangeRecord> exchanges,
    std::span<const devicelog::BroadcastRecord> broadcasts) {
  std::map<keysched::IntervalTime, Key16> own;
  for (const auto& b : broadcasts) {
    own.emplace(keysched::IntervalOf(b.timestamp), b.rpi);
  }
  std::vector<RecombinedRecord> out;
  out.reserve(exchanges.size());
  for (const auto& e : exchanges) {
    auto when = keysched::IntervalOf(e.timestamp);
    auto it = own.find(when);
    COAVOID_ENFORCE(it != own.end(), ErrorCode::kMissingBroadcast,
                    "no broadcast for day " + std::to_string(when.day_index) +
                        " interval " + std::to_string(when.interval));
    out.push_back({it->second, e.cell_digest, when, 1});
  }
  std::stable_sort(out.begin(), out.end(), UploadOrder);
  return out;
}

std::vector<RecombinedRecord> DedupePolicy(
    std::vector<RecombinedRecord> records) {
  std::stable_sort(records.begin(), records.end(), UploadOrder);
  std::vector<RecombinedRecord> out;
  for (auto& r : records) {
    if (!out.empty() && out.back().rpi == r.rpi &&
        out.back().cell_digest == r.cell_digest &&
        out.back().coarse_time == r.coarse_time) {
      out.back().multiplicity += r.multiplicity;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

std::string FormatUploadLine(const RecombinedRecord& r) {
  return ToHex(r.rpi) + "\t" + ToHex(r.cell_digest.digest) + "\t" +
         std::to_string(r.coarse_time.day_index) + ":" +
         std::to_string(r.coarse_time.interval) + "\t" +
         std::to_string(r.multiplicity);
}

RecombinedRecord ParseUploadLine(std::string_view line) {
  std::vector<std::string_view> f;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    f.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  COAVOID_ENFORCE(f.size() == 4, ErrorCode::kParseError,
                  "upload line needs 4 fields: '" + std::string(line) + "'");
  size_t colon = f[2].find(':');
  COAVOID_ENFORCE(colon != std::string_view::npos, ErrorCode::kParseError,
                  "bad coarse time '" + std::string(f[2]) + "'");
  RecombinedRecord r;
  r.rpi = FixedFromHex<16>(f[0]);
  r.cell_digest.digest = FixedFromHex<32>(f[1]);
  r.coarse_time.day_index = ParseInt(f[2].substr(0, colon), "day");
  int64_t interval = ParseInt(f[2].substr(colon + 1), "interval");
  COAVOID_ENFORCE(interval >= 1 && interval <= keysched::kIntervalsPerDay,
                  ErrorCode::kIntervalOutOfRange,
                  "interval " + std::to_string(interval));
  r.coarse_time.interval = static_cast<int>(interval);
  int64_t mult = ParseInt(f[3], "multiplicity");
  COAVOID_ENFORCE(mult >= 1 && mult <= UINT32_MAX, ErrorCode::kParseError,
                  "multiplicity " + std::to_string(mult));
  r.multiplicity = static_cast<uint32_t>(mult);
  return r;
}

std::string SerializeUpload(std::span<const RecombinedRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += FormatUploadLine(r);
    out += '\n';
  }
  return out;
}

std::vector<RecombinedRecord> ParseUpload(std::string_view text) {
  std::vector<RecombinedRecord> out;
  while (!text.empty()) {
    size_t nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty()) out.push_back(ParseUploadLine(line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

}  // namespace coavoid::filter
