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

#include <gtest/gtest.h>

#include <vector>

#include "coavoid/error.h"

namespace coavoid::riskscore {
namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kParseError;
}

TEST(RiskScoreTest, Examples) {
  EXPECT_EQ(RiskScore({0, 5, 5, 5}), 0);
  EXPECT_EQ(RiskScore({8, 8, 8, 8}), 4096);
  EXPECT_EQ(RiskScore({2, 3, 1, 4}), 24);
}

TEST(RiskScoreTest, LevelRange) {
  EXPECT_EQ(CodeOf([] { RiskScore({9, 1, 1, 1}); }), ErrorCode::kLevelOutOfRange);
  EXPECT_EQ(CodeOf([] { RiskScore({1, 1, -1, 1}); }), ErrorCode::kLevelOutOfRange);
}

TEST(RiskScoreTest, MonotoneOverGrid) {
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 8; ++b)
      for (int c = 0; c <= 8; ++c)
        for (int d = 0; d <= 8; ++d) {
          const int s = RiskScore({a, b, c, d});
          if (a < 8) EXPECT_LE(s, RiskScore({a + 1, b, c, d}));
          if (b < 8) EXPECT_LE(s, RiskScore({a, b + 1, c, d}));
          if (c < 8) EXPECT_LE(s, RiskScore({a, b, c + 1, d}));
          if (d < 8) EXPECT_LE(s, RiskScore({a, b, c, d + 1}));
          if (a == 0 || b == 0 || c == 0 || d == 0) EXPECT_EQ(s, 0);
        }
}

TEST(DeriveTest, PasserByDoesNotWarn) {
  std::vector<Exposure> hits = {{2.0, -45}};
  auto f = DeriveFactors(hits, 0, 5);
  EXPECT_EQ(f.durv, 0);
  EXPECT_EQ(f.darv, 8);
  EXPECT_EQ(f.arv, 8);
  EXPECT_EQ(RiskScore(f), 0);
  EXPECT_FALSE(ShouldWarn(RiskScore(f)));
}

TEST(DeriveTest, DurationBuckets) {
  RiskConfig cfg;
  EXPECT_EQ(DurationLevel(30, cfg), 6);
  EXPECT_EQ(DurationLevel(4.99, cfg), 0);
  EXPECT_EQ(DurationLevel(5, cfg), 1);
  EXPECT_EQ(DurationLevel(600, cfg), 8);
  std::vector<Exposure> hits = {{10, -50}, {12, -50}, {8, -50}};
  EXPECT_EQ(DeriveFactors(hits, 0, 5).durv, 6);
}

TEST(DeriveTest, DaysSince) {
  EXPECT_EQ(DaysSinceLevel(0), 8);
  EXPECT_EQ(DaysSinceLevel(1), 8);
  EXPECT_EQ(DaysSinceLevel(2), 7);
  EXPECT_EQ(DaysSinceLevel(15), 1);
  EXPECT_EQ(DaysSinceLevel(16), 0);
  EXPECT_EQ(DaysSinceLevel(30), 0);
}

TEST(DeriveTest, AttenuationBands) {
  RiskConfig cfg;
  EXPECT_EQ(AttenuationLevel(30, cfg), 8);
  EXPECT_EQ(AttenuationLevel(47.9, cfg), 8);
  EXPECT_EQ(AttenuationLevel(48, cfg), 7);
  EXPECT_EQ(AttenuationLevel(103.9, cfg), 1);
  EXPECT_EQ(AttenuationLevel(104, cfg), 0);
}

TEST(DeriveTest, AttenuationIsDurationWeighted) {
  // (1 * 40 + 3 * 72) / 4 = 64 dB, band 3, level 5.
  std::vector<Exposure> hits = {{1, -40}, {3, -72}};
  EXPECT_EQ(DeriveFactors(hits, 0, 1).arv, 5);
}

TEST(DeriveTest, Errors) {
  EXPECT_EQ(CodeOf([] { DeriveFactors({}, 0, 5); }), ErrorCode::kNoHits);
  std::vector<Exposure> hits = {{1, -40}};
  EXPECT_EQ(CodeOf([&] { DeriveFactors(hits, 0, 9); }), ErrorCode::kLevelOutOfRange);
  RiskConfig bad;
  bad.duration_bucket_min = 0;
  EXPECT_EQ(CodeOf([&] { DeriveFactors(hits, 0, 5, bad); }), ErrorCode::kConfigInvalid);
}

TEST(DeriveTest, LongCloseRecentContactWarns) {
  std::vector<Exposure> hits = {{20, -50}};
  auto f = DeriveFactors(hits, 1, 5);
  EXPECT_EQ(f, (RiskFactors{5, 4, 8, 7}));
  EXPECT_TRUE(ShouldWarn(RiskScore(f)));
}

}  // namespace
}  // namespace coavoid::riskscore
