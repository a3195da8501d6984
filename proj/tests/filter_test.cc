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

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "coavoid/error.h"

namespace coavoid::filter {
namespace {

using devicelog::BroadcastRecord;
using devicelog::ExchangeRecord;

constexpr int64_t kDay0 = 18483 * keysched::kSecondsPerDay;

std::string ReadTestdata(const std::string& name) {
  std::ifstream in(std::string(COAVOID_TESTDATA_DIR) + "/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

geocell::CellDigest Digest(uint8_t tag) {
  geocell::CellDigest d;
  d.digest.fill(tag);
  return d;
}

Key16 Rpi(uint8_t tag) {
  Key16 k{};
  k.fill(tag);
  return k;
}

int64_t AtInterval(int interval, int64_t offset = 60) {
  return kDay0 + (interval - 1) * keysched::kIntervalSeconds + offset;
}

// A patient that broadcasts every interval of day 0 with RPI tag = interval.
std::vector<BroadcastRecord> FullDayBroadcasts() {
  std::vector<BroadcastRecord> out;
  for (int i = 1; i <= keysched::kIntervalsPerDay; ++i) {
    out.push_back({AtInterval(i, 0), Rpi(static_cast<uint8_t>(i))});
    out.push_back({AtInterval(i, 120), Rpi(static_cast<uint8_t>(i))});
  }
  return out;
}

TEST(FilterAndRecombineTest, EmptyExchanges) {
  EXPECT_TRUE(FilterAndRecombine({}, FullDayBroadcasts()).empty());
}

TEST(FilterAndRecombineTest, GoldenFixture) {
  auto log = devicelog::DeviceLog::Parse(ReadTestdata("filter_patient_log.tsv"));
  auto out = FilterAndRecombine(log.exchanges(), log.broadcasts());
  EXPECT_EQ(SerializeUpload(out), ReadTestdata("filter_expected_upload.tsv"));
}

TEST(FilterAndRecombineTest, SingleExchange) {
  auto bc = FullDayBroadcasts();
  std::vector<ExchangeRecord> ex = {{AtInterval(37, 240), Rpi(0xee), Digest(9), -60}};
  auto out = FilterAndRecombine(ex, bc);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (RecombinedRecord{Rpi(37), Digest(9), {18483, 37}, 1}));
}

TEST(FilterAndRecombineTest, SameIntervalSameCellKeepsMultiset) {
  auto bc = FullDayBroadcasts();
  std::vector<ExchangeRecord> ex = {
      {AtInterval(12, 10), Rpi(0xe1), Digest(5), -60},
      {AtInterval(12, 130), Rpi(0xe2), Digest(5), -61}};
  auto out = FilterAndRecombine(ex, bc);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], out[1]);
  EXPECT_EQ(out[0].rpi, Rpi(12));
}

TEST(FilterAndRecombineTest, MissingBroadcastIsAnError) {
  std::vector<BroadcastRecord> bc = {{AtInterval(5), Rpi(5)}};
  std::vector<ExchangeRecord> ex = {{AtInterval(6), Rpi(0xe0), Digest(1), -50}};
  try {
    FilterAndRecombine(ex, bc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingBroadcast);
  }
  // The same interval number on another day does not count.
  bc = {{AtInterval(6) + keysched::kSecondsPerDay, Rpi(6)}};
  EXPECT_THROW(FilterAndRecombine(ex, bc), Error);
}

struct RandomLogs {
  std::vector<BroadcastRecord> broadcasts;
  std::vector<ExchangeRecord> exchanges;
  std::multiset<keysched::IntervalTime> exchange_intervals;
};

// Patient RPIs have a leading 0x00 byte, partner RPIs 0xff.
RandomLogs MakeRandomLogs(uint64_t seed) {
  std::mt19937_64 gen(seed);
  RandomLogs logs;
  for (int day = 0; day < 3; ++day) {
    for (int i = 1; i <= keysched::kIntervalsPerDay; ++i) {
      Key16 own{};
      for (auto& b : own) b = static_cast<uint8_t>(gen());
      own[0] = 0x00;
      int64_t start = kDay0 + day * keysched::kSecondsPerDay +
                      (i - 1) * keysched::kIntervalSeconds;
      for (int64_t t = start; t < start + 900; t += 120) {
        logs.broadcasts.push_back({t, own});
      }
      int contacts = gen() % 10 < 8 ? 0 : static_cast<int>(gen() % 4) + 1;
      for (int c = 0; c < contacts; ++c) {
        Key16 partner{};
        for (auto& b : partner) b = static_cast<uint8_t>(gen());
        partner[0] = 0xff;
        int64_t t = start + static_cast<int64_t>(gen() % 900);
        logs.exchanges.push_back(
            {t, partner, Digest(static_cast<uint8_t>(gen() % 4)), -60});
        logs.exchange_intervals.insert(keysched::IntervalOf(t));
      }
    }
  }
  std::sort(logs.exchanges.begin(), logs.exchanges.end(),
            [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return logs;
}

TEST(FilterPropertyTest, OutputNeverContainsPartnerRpis) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    auto logs = MakeRandomLogs(seed);
    std::set<Key16> partner;
    for (const auto& e : logs.exchanges) partner.insert(e.rpi);
    std::set<Key16> own;
    for (const auto& b : logs.broadcasts) own.insert(b.rpi);
    for (const auto& r : FilterAndRecombine(logs.exchanges, logs.broadcasts)) {
      ASSERT_EQ(partner.count(r.rpi), 0u);
      ASSERT_EQ(own.count(r.rpi), 1u);
    }
  }
}

TEST(FilterPropertyTest, IntervalsMatchExchangesExactly) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    auto logs = MakeRandomLogs(seed);
    auto out = FilterAndRecombine(logs.exchanges, logs.broadcasts);
    std::multiset<keysched::IntervalTime> got;
    for (const auto& r : out) got.insert(r.coarse_time);
    ASSERT_EQ(got, logs.exchange_intervals);
    ASSERT_TRUE(std::is_sorted(out.begin(), out.end(), UploadOrder));
    // Each record carries the broadcast RPI of its own interval.
    std::map<keysched::IntervalTime, Key16> own;
    for (const auto& b : logs.broadcasts) own[keysched::IntervalOf(b.timestamp)] = b.rpi;
    for (const auto& r : out) ASSERT_EQ(own.at(r.coarse_time), r.rpi);
  }
}

TEST(FilterPropertyTest, NoContactNoUpload) {
  auto logs = MakeRandomLogs(3);
  size_t contact_intervals =
      std::set<keysched::IntervalTime>(logs.exchange_intervals.begin(),
                                       logs.exchange_intervals.end())
          .size();
  auto out = DedupePolicy(FilterAndRecombine(logs.exchanges, logs.broadcasts));
  std::set<keysched::IntervalTime> uploaded;
  for (const auto& r : out) uploaded.insert(r.coarse_time);
  EXPECT_EQ(uploaded.size(), contact_intervals);
  EXPECT_LT(contact_intervals, 3u * keysched::kIntervalsPerDay);
  EXPECT_TRUE(FilterAndRecombine({}, logs.broadcasts).empty());
}

TEST(FilterPropertyTest, OutputHasGapsWhereContactsHaveGaps) {
  auto bc = FullDayBroadcasts();
  std::vector<ExchangeRecord> ex = {
      {AtInterval(3), Rpi(0xe0), Digest(1), -50},
      {AtInterval(4), Rpi(0xe0), Digest(1), -50},
      {AtInterval(40), Rpi(0xe1), Digest(2), -50},
      {AtInterval(77), Rpi(0xe2), Digest(3), -50}};
  auto out = FilterAndRecombine(ex, bc);
  std::vector<int> intervals;
  for (const auto& r : out) intervals.push_back(r.coarse_time.interval);
  EXPECT_EQ(intervals, (std::vector<int>{3, 4, 40, 77}));
}

TEST(DedupePolicyTest, Basics) {
  EXPECT_TRUE(DedupePolicy({}).empty());
  RecombinedRecord a{Rpi(1), Digest(1), {1, 1}, 1};
  auto out = DedupePolicy({a, a});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].multiplicity, 2u);
}

TEST(DedupePolicyTest, FiveRecordFixture) {
  RecombinedRecord a{Rpi(1), Digest(1), {1, 10}, 1};
  RecombinedRecord b{Rpi(1), Digest(2), {1, 10}, 1};
  RecombinedRecord c{Rpi(2), Digest(1), {1, 11}, 1};
  RecombinedRecord d{Rpi(1), Digest(1), {2, 10}, 1};
  auto out = DedupePolicy({d, a, c, b, a});
  ASSERT_EQ(out.size(), 4u);
  std::vector<uint32_t> mult;
  for (const auto& r : out) mult.push_back(r.multiplicity);
  EXPECT_EQ(mult, (std::vector<uint32_t>{2, 1, 1, 1}));
  EXPECT_EQ(out[0].cell_digest, Digest(1));
  EXPECT_EQ(out[0].coarse_time, (keysched::IntervalTime{1, 10}));
}

TEST(UploadLineTest, RoundTripAndFormat) {
  RecombinedRecord r{Rpi(0x1f), Digest(0xa0), {18483, 37}, 3};
  EXPECT_EQ(FormatUploadLine(r),
            "1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f\t" + ToHex(Digest(0xa0).digest) +
                "\t18483:37\t3");
  EXPECT_EQ(ParseUploadLine(FormatUploadLine(r)), r);
  auto logs = MakeRandomLogs(9);
  auto recs = DedupePolicy(FilterAndRecombine(logs.exchanges, logs.broadcasts));
  EXPECT_EQ(ParseUpload(SerializeUpload(recs)), recs);
}

TEST(UploadLineTest, RejectsMalformed) {
  auto good = FormatUploadLine({Rpi(1), Digest(1), {5, 6}, 1});
  EXPECT_THROW(ParseUploadLine(good.substr(0, good.size() - 2)), Error);
  EXPECT_THROW(ParseUploadLine("00\t00\t1:1\t1"), Error);
  auto bad_interval = good;
  bad_interval.replace(bad_interval.find(":6"), 2, ":97");
  EXPECT_THROW(ParseUploadLine(bad_interval), Error);
  auto zero_mult = good.substr(0, good.size() - 1) + "0";
  EXPECT_THROW(ParseUploadLine(zero_mult), Error);
}

}  // namespace
}  // namespace coavoid::filter
