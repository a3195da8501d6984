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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "coavoid/error.h"

namespace coavoid::devicelog {
namespace {

constexpr int64_t kAug9At0904 = 1596963840;  // 2020-08-09T09:04:00Z
constexpr int64_t kDay = keysched::kSecondsPerDay;

Key16 TestRpi(uint8_t tag) {
  Key16 k{};
  k.fill(tag);
  return k;
}

geocell::CellDigest TestDigest(uint8_t tag) {
  geocell::CellDigest d;
  d.digest.fill(tag);
  return d;
}

ExchangeRecord At(int64_t ts) { return {ts, TestRpi(1), TestDigest(2), -60}; }

TEST(Iso8601Test, RoundTrip) {
  EXPECT_EQ(FormatIso8601(kAug9At0904), "2020-08-09T09:04:00Z");
  EXPECT_EQ(FormatIso8601(0), "1970-01-01T00:00:00Z");
  EXPECT_EQ(ParseIso8601("2020-08-09T09:04:00Z"), kAug9At0904);
  std::mt19937_64 gen(3);
  for (int i = 0; i < 1000; ++i) {
    int64_t t = static_cast<int64_t>(gen() % 4'000'000'000ull);
    ASSERT_EQ(ParseIso8601(FormatIso8601(t)), t);
  }
}

TEST(Iso8601Test, RejectsMalformed) {
  for (const char* bad :
       {"2020-08-09 09:04:00", "2020-13-01T00:00:00Z", "2020-02-30T00:00:00Z",
        "2020-08-09T24:00:00Z", "2020-08-09T09:04:00", "garbage",
        "2020-08-09T09:04:00Zx"}) {
    EXPECT_THROW(ParseIso8601(bad), Error) << bad;
  }
}

TEST(DeviceLogTest, SingleAppend) {
  DeviceLog log;
  log.RecordExchange(kAug9At0904, TestRpi(1), TestDigest(2), -55);
  ASSERT_EQ(log.exchanges().size(), 1u);
  EXPECT_EQ(log.exchanges()[0],
            (ExchangeRecord{kAug9At0904, TestRpi(1), TestDigest(2), -55}));
}

TEST(DeviceLogTest, RetentionBoundary) {
  DeviceLog log;
  log.RecordExchange(0, TestRpi(1), TestDigest(1), -50);
  log.RecordBroadcast(0, TestRpi(9));
  // Exactly 14 days later the old record is still inside the window.
  log.RecordExchange(14 * kDay, TestRpi(2), TestDigest(2), -50);
  EXPECT_EQ(log.exchanges().size(), 2u);
  log.RecordExchange(15 * kDay, TestRpi(3), TestDigest(3), -50);
  ASSERT_EQ(log.exchanges().size(), 2u);
  EXPECT_EQ(log.exchanges().front().rpi, TestRpi(2));
  EXPECT_TRUE(log.broadcasts().empty());
}

TEST(DeviceLogTest, RetentionInvariantUnderRandomClock) {
  DeviceLog log;
  std::mt19937_64 gen(17);
  int64_t now = 0;
  for (int i = 0; i < 5000; ++i) {
    now += static_cast<int64_t>(gen() % 3600);
    if (gen() % 2) {
      log.RecordBroadcast(now, TestRpi(static_cast<uint8_t>(i)));
    } else {
      log.RecordExchange(now, TestRpi(static_cast<uint8_t>(i)), TestDigest(0),
                         -70);
    }
    ASSERT_GE(log.exchanges().empty() ? now : log.exchanges().front().timestamp,
              now - kRetentionSeconds);
    ASSERT_GE(
        log.broadcasts().empty() ? now : log.broadcasts().front().timestamp,
        now - kRetentionSeconds);
  }
}

TEST(DeviceLogTest, ChronologicalOrderOverTenThousandAppends) {
  std::mt19937_64 gen(29);
  std::vector<int64_t> stamps(10000);
  for (auto& t : stamps) t = 1'600'000'000 + static_cast<int64_t>(gen() % 86400);
  std::sort(stamps.begin(), stamps.end());
  DeviceLog log;
  for (size_t i = 0; i < stamps.size(); ++i) {
    log.RecordExchange(stamps[i], TestRpi(static_cast<uint8_t>(i)),
                       TestDigest(0), -60);
  }
  ASSERT_EQ(log.exchanges().size(), stamps.size());
  for (size_t i = 0; i < stamps.size(); ++i) {
    ASSERT_EQ(log.exchanges()[i].timestamp, stamps[i]);
    ASSERT_EQ(log.exchanges()[i].rpi, TestRpi(static_cast<uint8_t>(i)));
  }
}

TEST(DeviceLogTest, OutOfOrderInsertStaysSorted) {
  DeviceLog log;
  for (int64_t t : {50, 10, 30, 30, 20}) {
    log.RecordBroadcast(t, TestRpi(static_cast<uint8_t>(t)));
  }
  std::vector<int64_t> got;
  for (const auto& b : log.broadcasts()) got.push_back(b.timestamp);
  EXPECT_EQ(got, (std::vector<int64_t>{10, 20, 30, 30, 50}));
}

TEST(DeviceLogTest, AppendDoesNotRewriteExisting) {
  DeviceLog log;
  log.RecordExchange(100, TestRpi(1), TestDigest(1), -50);
  auto before = log.exchanges()[0];
  log.RecordExchange(200, TestRpi(1), TestDigest(1), -80);
  EXPECT_EQ(log.exchanges()[0], before);
}

TEST(DeviceLogTest, LineFormat) {
  DeviceLog log;
  log.RecordBroadcast(kAug9At0904, TestRpi(0xab));
  log.RecordExchange(kAug9At0904, TestRpi(0x01), TestDigest(0xcd), -63);
  const std::string expected =
      "EX\t2020-08-09T09:04:00Z\t01010101010101010101010101010101\t"
      "cdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcdcd\t-63\n"
      "BC\t2020-08-09T09:04:00Z\tabababababababababababababababab\n";
  EXPECT_EQ(log.Serialize(), expected);
}

TEST(DeviceLogTest, FileRoundTrip) {
  DeviceLog log;
  std::mt19937_64 gen(41);
  int64_t t = kAug9At0904;
  for (int i = 0; i < 200; ++i) {
    t += static_cast<int64_t>(gen() % 600);
    log.RecordBroadcast(t, TestRpi(static_cast<uint8_t>(gen())));
    log.RecordExchange(t, TestRpi(static_cast<uint8_t>(gen())),
                       TestDigest(static_cast<uint8_t>(gen())),
                       -static_cast<int>(gen() % 90));
  }
  auto path = std::filesystem::temp_directory_path() / "coavoid_devicelog.tsv";
  log.WriteFile(path);
  auto back = DeviceLog::ReadFile(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.broadcasts(), log.broadcasts());
  EXPECT_EQ(back.exchanges(), log.exchanges());
  EXPECT_EQ(back.Serialize(), log.Serialize());
}

TEST(DeviceLogTest, ParseErrors) {
  EXPECT_THROW(DeviceLog::Parse("XX\t2020-08-09T09:04:00Z\n"), Error);
  EXPECT_THROW(DeviceLog::Parse("BC\t2020-08-09T09:04:00Z\tzz\n"), Error);
  EXPECT_THROW(DeviceLog::Parse("EX\t2020-08-09T09:04:00Z\t" +
                                ToHex(TestRpi(1)) + "\t" +
                                ToHex(TestDigest(1).digest) + "\tloud\n"),
               Error);
  EXPECT_THROW(DeviceLog::ReadFile("/nonexistent/coavoid.log"), Error);
}

TEST(ValidateTimestampTest, SightingsAroundNineOClock) {
  // RPI of 09:00-09:15 is interval 37.
  EXPECT_TRUE(ValidateTimestamp(At(kAug9At0904), 37));
  EXPECT_FALSE(ValidateTimestamp(At(kAug9At0904 - 4 * 60 + 2 * 3600), 37));
  EXPECT_TRUE(ValidateTimestamp(At(kAug9At0904 + 12 * 60), 37));  // 09:16
}

TEST(ValidateTimestampTest, BoundarySweep) {
  const int64_t nine = kAug9At0904 - 4 * 60;
  // Every second from 08:45 to 09:30 is accepted, nothing outside it.
  for (int64_t t = nine - 1800; t < nine + 2700; t += 30) {
    bool inside = t >= nine - 900 && t < nine + 1800;
    ASSERT_EQ(ValidateTimestamp(At(t), 37), inside) << t - nine;
  }
}

TEST(ValidateTimestampTest, ReplayRejectedForEveryOffsetAboveOne) {
  for (int i = 1; i <= keysched::kIntervalsPerDay; ++i) {
    int64_t sighting = 18483 * kDay + (i - 1) * keysched::kIntervalSeconds + 7;
    for (int j = 1; j <= keysched::kIntervalsPerDay; ++j) {
      ASSERT_EQ(ValidateTimestamp(At(sighting), j), std::abs(i - j) <= 1)
          << i << " vs " << j;
    }
  }
}

TEST(ValidateTimestampTest, CrossesMidnightWithDayAwareForm) {
  int64_t just_after_midnight = 18484 * kDay + 60;
  EXPECT_TRUE(ValidateTimestamp(At(just_after_midnight),
                                keysched::IntervalTime{18483, 96}));
  EXPECT_FALSE(ValidateTimestamp(At(just_after_midnight),
                                 keysched::IntervalTime{18483, 95}));
  // Same interval number a day earlier is a replay.
  EXPECT_FALSE(ValidateTimestamp(At(just_after_midnight),
                                 keysched::IntervalTime{18483, 1}));
}

TEST(SyntheticRssiTest, DistanceModel) {
  EXPECT_EQ(SyntheticRssi(1.0, 0.0), -40);
  EXPECT_EQ(SyntheticRssi(10.0, 0.0), -65);
  EXPECT_EQ(SyntheticRssi(0.1, 0.0), SyntheticRssi(0.5, 0.0));
  EXPECT_EQ(SyntheticRssi(10.0, 3.0), -62);
}

}  // namespace
}  // namespace coavoid::devicelog
