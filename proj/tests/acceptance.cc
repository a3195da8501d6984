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

// Acceptance runner. Prints one "ACn PASS|FAIL <detail>" line per
// criterion. Exit status is 0 when every criterion either passed or is
// listed in --expect-fail and failed; anything else is non-zero.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "coavoid/crypto.h"
#include "coavoid/devicelog.h"
#include "coavoid/edgeserver.h"
#include "coavoid/error.h"
#include "coavoid/finematch/bigint.h"
#include "coavoid/finematch/params.h"
#include "coavoid/finematch/protocol.h"
#include "coavoid/keysched.h"
#include "coavoid/simharness/sim.h"

namespace {

using namespace coavoid;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------- AC1

bool OracleInside(const finematch::DiameterPair& pair, finematch::FixedPoint u) {
  __int128 ax = u.x - pair.p1.x, ay = u.y - pair.p1.y;
  __int128 bx = u.x - pair.p2.x, by = u.y - pair.p2.y;
  return ax * bx + ay * by < 0;
}

struct AgreeCount {
  int agree = 0;
  int disagree = 0;
  int overflow = 0;
};

AgreeCount RunInstances(const finematch::FineGrainParams& params, int n,
                        uint64_t seed) {
  using namespace finematch;
  DeterministicRandom rng(seed, "acceptance-instances");
  std::mt19937_64 gen(seed);
  const int beta = params.bits.coord_bits;
  const int64_t span = int64_t{1} << beta;
  const int64_t max_r = std::max<int64_t>(4, span / 64);
  std::uniform_int_distribution<int64_t> radius_d(1, max_r);
  std::uniform_int_distribution<int64_t> coord(0, span - 1);
  std::uniform_real_distribution<double> heading(0, 6.283185307179586);
  AgreeCount out;
  for (int i = 0; i < n; ++i) {
    const int64_t r = radius_d(gen);
    std::uniform_int_distribution<int64_t> c(r + 1, span - r - 2);
    FixedPoint center{c(gen), c(gen)};
    FixedPoint user;
    if (i % 2) {
      user = {coord(gen), coord(gen)};
    } else {
      std::uniform_int_distribution<int64_t> near(-2 * r, 2 * r);
      user = {std::clamp<int64_t>(center.x + near(gen), 0, span - 1),
              std::clamp<int64_t>(center.y + near(gen), 0, span - 1)};
    }
    auto pair = MakeDiameterPair(center, r, heading(gen), beta);
    const bool expect = OracleInside(pair, user);
    try {
      std::optional<AnchorSecrets> secrets;
      std::optional<EncryptedAnchor> anchor;
      for (int attempt = 0; !anchor; ++attempt) {
        secrets.emplace(AnchorSecrets::Generate(params, rng));
        try {
          anchor = EncryptAnchor(params, *secrets, pair);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kSanityCheckFailed || attempt > 8) throw;
        }
      }
      auto resp = Respond(params, *anchor, user, rng);
      auto d = Decide(params, *secrets, resp);
      ((d.verdict == Verdict::kInside) == expect ? out.agree : out.disagree)++;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoiseOverflow) throw;
      ++out.overflow;
    }
  }
  return out;
}

Outcome Ac1() {
  using namespace finematch;
  auto t0 = Clock::now();
  DeterministicRandom prng(101, "acceptance-params");
  auto toy = GenParams(kToyBitLengths, prng);
  auto toy_count = RunInstances(toy, 10000, 1);
  const bool toy_ok = toy_count.agree == 10000;

  // The literal default set.
  const BitLengths literal{800, 320, 128, 128, 22};
  std::string literal_note;
  bool literal_ok = false;
  try {
    auto params = GenParams(literal, prng);
    auto c = RunInstances(params, 1000, 2);
    literal_ok = c.agree == 1000;
    literal_note = fmt::format("k2=320 {}/1000", c.agree);
  } catch (const Error& e) {
    // Diagnostic only: same run with the constraint check bypassed.
    FineGrainParams unchecked{literal, RandomPrime(prng, 800), RandomPrime(prng, 320)};
    auto c = RunInstances(unchecked, 1000, 2);
    literal_note = fmt::format(
        "k2=320 refused by gen_params ({}; LHS1={} RHS={}); unchecked run "
        "agree={} disagree={} overflow={}",
        ErrorCodeName(e.code()), ConstraintLhs(literal, 1),
        ConstraintRhs(literal, 1), c.agree, c.disagree, c.overflow);
  }
  auto shipped = GenParams(kDefaultBitLengths, prng);
  auto shipped_count = RunInstances(shipped, 1000, 3);
  const double secs = Since(t0);
  return {toy_ok && literal_ok && secs < 60,
          fmt::format("toy {}/10000; {}; shipped k2=310 {}/1000; {:.1f}s",
                      toy_count.agree, literal_note, shipped_count.agree, secs)};
}

// ---------------------------------------------------------------- AC2

// Independent statement of the three inequalities.
std::array<bool, 3> Holds(int k1, int k2, int k3, int k4, int beta) {
  const int m1 = std::max(2 * k2 + 2 * beta + 2, k2 + beta + k3 + 2);
  const int m2 = std::max(2 * k2 + 2 * beta + 2, k2 + 2 * beta + 1 + k3);
  return {k4 + m1 < k1, k4 + m2 < k1, k4 + k3 + 2 * beta + 2 < k2};
}

Outcome Ac2() {
  using namespace finematch;
  int mismatches = 0;
  for (int k1 = 64; k1 <= 1024; k1 += 16) {
    for (int k2 = 16; k2 <= k1; k2 += 4) {
      for (int k3 : {16, 32, 64, 128}) {
        for (int k4 : {16, 32, 128}) {
          for (int beta : {8, 10, 16, 22}) {
            BitLengths b{k1, k2, k3, k4, beta};
            auto h = Holds(k1, k2, k3, k4, beta);
            for (int i = 0; i < 3; ++i) {
              if ((ConstraintLhs(b, i + 1) < ConstraintRhs(b, i + 1)) != h[i]) ++mismatches;
            }
            auto first = FirstViolatedConstraint(b);
            const bool ok = h[0] && h[1] && h[2];
            if (ok != !first.has_value()) ++mismatches;
          }
        }
      }
    }
  }
  auto try_gen = [](int k2) -> std::string {
    DeterministicRandom rng(5, "ac2");
    try {
      GenParams({800, k2, 128, 128, 22}, rng);
      return "accepted";
    } catch (const Error& e) {
      return std::string(ErrorCodeName(e.code()));
    }
  };
  const std::string r300 = try_gen(300);
  const std::string r320 = try_gen(320);
  const bool pass = mismatches == 0 && r300 != "accepted" && r320 == "accepted";
  return {pass, fmt::format("k2=300 -> {}; k2=320 -> {} (ineq1 {} vs {}); "
                            "symbolic mismatches {}",
                            r300, r320, ConstraintLhs({800, 320, 128, 128, 22}, 1),
                            ConstraintRhs({800, 320, 128, 128, 22}, 1), mismatches)};
}

// ---------------------------------------------------------------- AC3/AC4

struct SeedRun {
  uint64_t seed;
  simharness::MetricsReport report;
  double seconds;
};

const std::vector<SeedRun>& DefaultRuns() {
  static const std::vector<SeedRun> runs = [] {
    std::vector<SeedRun> out;
    for (uint64_t seed : {42, 1, 2, 3, 4}) {
      simharness::SimConfig c;
      c.seed = seed;
      auto t0 = Clock::now();
      auto r = simharness::Run(c);
      out.push_back({seed, std::move(r), Since(t0)});
    }
    return out;
  }();
  return runs;
}

Outcome Ac3() {
  bool pass = true;
  std::string detail;
  for (const auto& run : DefaultRuns()) {
    const double ratio = simharness::UploadRatio(run.report);
    const double bar = run.seed == 42 ? 0.10 : 0.15;
    const bool ok = ratio > 0 && ratio <= bar && run.seconds < 120;
    pass = pass && ok;
    detail += fmt::format("seed {} ratio {:.4f} ({:.0f}s){}; ", run.seed, ratio,
                          run.seconds, ok ? "" : " !");
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome Ac4() {
  bool pass = true;
  int64_t truth = 0;
  int bad_days = 0;
  for (const auto& run : DefaultRuns()) {
    for (const auto& d : run.report.days) {
      truth += d.true_contacts;
      if (d.detected_contacts != d.true_contacts || d.false_contacts != 0 ||
          d.missed_contacts != 0) {
        ++bad_days;
        pass = false;
      }
    }
  }
  pass = pass && truth > 0;
  return {pass, fmt::format("{} seeds, {} true contacts, {} mismatching days",
                            DefaultRuns().size(), truth, bad_days)};
}

// ---------------------------------------------------------------- AC5

const std::regex kLoc1(
    R"(^Location Verification\[1\]: \[INFO\] \[P\] [0-9a-f]{64} \[U\] [0-9a-f]{64} \[(Wormhole Attack|Correct)\]$)");
const std::regex kLoc2(
    R"(^Location Verification\[2\]: \[INFO\] \[Final\] \S+ \[(Wormhole Attack|Correct)\]$)");
const std::regex kStamp(
    R"(^Timestamp Verification: \[INFO\] \[P\] \d+:\d+ \[U\] \d+:\d+ \[(Replay Attack|Correct)\]$)");

Outcome Ac5() {
  using simharness::AttackKind;
  using simharness::AttackScenario;
  struct Case {
    const char* name;
    AttackScenario scenario;
  };
  AttackScenario replay{AttackKind::kReplay, 0, {0}};
  const std::vector<Case> cases = {
      {"cross-cell", {AttackKind::kWormhole, 0, {1}}},
      {"same-cell", {AttackKind::kWormhole, 0, {0}, true}},
      {"replay", replay},
  };
  bool pass = true;
  std::string detail;
  std::set<std::string> tokens;
  for (const auto& c : cases) {
    simharness::SimConfig config;
    config.days = 7;
    config.patient_fraction = {0.05};
    config.attacks = {c.scenario};
    auto r = simharness::RunAttack(config);
    const int64_t suspects =
        r.wormhole_suspects + r.replay_suspects + r.fine_rejected;
    int malformed = 0;
    for (const auto& line : r.log_lines) {
      if (!std::regex_match(line, kLoc1) && !std::regex_match(line, kLoc2) &&
          !std::regex_match(line, kStamp)) {
        ++malformed;
      }
      for (const char* t : {"[Wormhole Attack]", "[Correct]", "[Replay Attack]"}) {
        if (line.find(t) != std::string::npos) tokens.insert(t);
      }
    }
    const bool ok = r.false_contacts == 0 && suspects > 0 && malformed == 0 &&
                    !r.log_lines.empty();
    pass = pass && ok;
    detail += fmt::format("{}: inj {} suspects {} false {} lines {} bad {}; ",
                          c.name, r.injections, suspects, r.false_contacts,
                          r.log_lines.size(), malformed);
  }
  pass = pass && tokens.size() == 3;
  detail += fmt::format("tokens seen {}", tokens.size());
  return {pass, detail};
}

// ---------------------------------------------------------------- AC6

filter::RecombinedRecord Rec(int owner, int i) {
  filter::RecombinedRecord r;
  r.rpi.fill(static_cast<uint8_t>(i));
  r.rpi[15] = static_cast<uint8_t>(owner);
  r.cell_digest.digest.fill(static_cast<uint8_t>(owner * 7 + 1));
  r.coarse_time = {18483, 1 + i};
  return r;
}

std::vector<filter::RecombinedRecord> Sorted(std::vector<filter::RecombinedRecord> v) {
  std::sort(v.begin(), v.end(), filter::UploadOrder);
  return v;
}

Outcome Ac6() {
  constexpr int kPer = 50;
  constexpr int kTrials = 1000;
  constexpr int kN = 2 * kPer;
  // Exact mean of the adjacent same-owner pair count under a uniform
  // permutation: (n-1) * 2 * C(50,2) / C(100,2).
  const double exact = (kN - 1) * 2.0 * kPer * (kPer - 1) / (kN * (kN - 1.0));
  // Spread of the per-trial count from a reference Monte-Carlo shuffle.
  std::mt19937_64 gen(2024);
  std::vector<int> ref(kN);
  for (int i = 0; i < kN; ++i) ref[i] = i < kPer ? 0 : 1;
  double s = 0, ss = 0;
  constexpr int kRef = 50000;
  for (int i = 0; i < kRef; ++i) {
    std::shuffle(ref.begin(), ref.end(), gen);
    int same = 0;
    for (int j = 1; j < kN; ++j) same += ref[j] == ref[j - 1];
    s += same;
    ss += double(same) * same;
  }
  const double mc_mean = s / kRef;
  const double sigma = std::sqrt(ss / kRef - mc_mean * mc_mean);

  DeterministicRandom rng(66, "acceptance-obfuscation");
  edgeserver::ObfuscatedStore store(rng);
  std::vector<filter::RecombinedRecord> a, b;
  for (int i = 0; i < kPer; ++i) {
    a.push_back(Rec(0, i));
    b.push_back(Rec(1, i));
  }
  store.AcceptUpload(a);
  store.AcceptUpload(b);
  auto all = a;
  all.insert(all.end(), b.begin(), b.end());
  all = Sorted(all);
  const int64_t now = 18483 * keysched::kSecondsPerDay + 3600;
  int multiset_failures = 0;
  double total = 0;
  for (int t = 0; t < kTrials; ++t) {
    auto snap = store.Publish(now);
    std::vector<filter::RecombinedRecord> got;
    std::vector<int> owner;
    for (const auto& r : *snap) {
      got.push_back(edgeserver::ToRecombined(r));
      owner.push_back(r.rpi[15]);
    }
    if (Sorted(got) != all) ++multiset_failures;
    int same = 0;
    for (size_t j = 1; j < owner.size(); ++j) same += owner[j] == owner[j - 1];
    total += same;
  }
  const double mean = total / kTrials;
  const double z = (mean - exact) / (sigma / std::sqrt(kTrials));
  const bool pass = std::abs(z) <= 3 && multiset_failures == 0 &&
                    std::abs(mc_mean - exact) < 4 * sigma / std::sqrt(kRef);
  return {pass, fmt::format("mean same-pairs {:.3f} expected {:.3f} "
                            "(sigma {:.3f}, z {:.2f}); multiset failures {}",
                            mean, exact, sigma, z, multiset_failures)};
}

// ---------------------------------------------------------------- AC7

Outcome Ac7(const std::string& vectors) {
  int checked = 0, wrong = 0;
  // Reference primitives against FIPS 180-4 / FIPS 197 first.
  const bool kat =
      ToHex(Sha256(AsBytes("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad" &&
      [] {
        Key16 key{};
        for (int i = 0; i < 16; ++i) key[i] = static_cast<uint8_t>(i);
        return ToHex(Aes128EncryptBlock(
                   key, FixedFromHex<16>("00112233445566778899aabbccddeeff"))) ==
               "69c4e0d86a7b0430d8cdb78070b4c55a";
      }();
  std::ifstream in(vectors);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string dtk_hex, rpi_hex;
    int interval = 0;
    f >> dtk_hex >> interval >> rpi_hex;
    keysched::DailyTracingKey dtk{0, FixedFromHex<16>(dtk_hex)};
    if (ToHex(keysched::DeriveRpi(keysched::DeriveRpik(dtk), interval).rpi) != rpi_hex) ++wrong;
    ++checked;
  }
  DeterministicRandom rng(7, "acceptance-keys");
  int short_days = 0;
  for (int day = 0; day < 50; ++day) {
    auto rpis = keysched::DeriveDayRpis(keysched::GenerateDailyTracingKey(day, rng));
    std::set<Key16> distinct(rpis.begin(), rpis.end());
    if (distinct.size() != 96) ++short_days;
  }
  const bool pass = kat && checked > 0 && wrong == 0 && short_days == 0;
  return {pass, fmt::format("primitive KATs {}; golden {}/{}; days with <96 "
                            "distinct RPIs {}/50",
                            kat ? "ok" : "bad", checked - wrong, checked, short_days)};
}

// ---------------------------------------------------------------- AC8

Outcome Ac8() {
  simharness::SimConfig c;
  c.users = 10000;
  c.places = 500;
  c.days = 3;
  auto t0 = Clock::now();
  auto b = simharness::Bench(c, 50);
  return {b.ratio > 0 && b.ratio <= 0.5,
          fmt::format("ratio {:.4f} (coavoid {:.5f}s/user, baseline {:.5f}s/user, "
                      "{} vs {} records, {} fine sessions, {:.0f}s)",
                      b.ratio, b.coavoid_seconds_per_user,
                      b.baseline_seconds_per_user, b.coavoid_records,
                      b.baseline_records, b.fine_sessions, Since(t0))};
}

// ---------------------------------------------------------------- AC9

Outcome Ac9() {
  DeterministicRandom rng(9, "acceptance-replay");
  auto dtk = keysched::GenerateDailyTracingKey(18483, rng);
  auto rpis = keysched::DeriveDayRpis(dtk);
  int64_t cases = 0, accepted = 0, adjacent_rejected = 0;
  for (int seen = 1; seen <= 96; ++seen) {
    devicelog::ExchangeRecord ex;
    ex.timestamp = keysched::IntervalStart({18483, seen}) + 450;
    for (int claimed = 1; claimed <= 96; ++claimed) {
      ex.rpi = rpis[claimed - 1];
      const bool a = devicelog::ValidateTimestamp(ex, claimed);
      const bool b = devicelog::ValidateTimestamp(ex, keysched::IntervalTime{18483, claimed});
      if (std::abs(seen - claimed) > 1) {
        ++cases;
        accepted += a || b;
      } else if (!a || !b) {
        ++adjacent_rejected;
      }
    }
  }
  return {cases == 96 * 96 - 96 - 2 * 95 && accepted == 0 && adjacent_rejected == 0,
          fmt::format("{} offset>1 cases, {} accepted; {} in-window rejected",
                      cases, accepted, adjacent_rejected)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string vectors = COAVOID_TESTDATA_DIR "/rpi_vectors.tsv";
  std::vector<std::string> expect_fail, only;
  app.add_option("--vectors", vectors, "golden RPI vectors");
  app.add_option("--expect-fail", expect_fail,
                 "criteria known not to hold; their failure does not fail the run")
      ->delimiter(',');
  app.add_option("--only", only, "run a subset, e.g. AC1,AC9")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", Ac1}, {"AC2", Ac2}, {"AC3", Ac3}, {"AC4", Ac4}, {"AC5", Ac5},
      {"AC6", Ac6}, {"AC7", [&] { return Ac7(vectors); }}, {"AC8", Ac8},
      {"AC9", Ac9},
  };
  const std::set<std::string> expected(expect_fail.begin(), expect_fail.end());
  int unexpected = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    fmt::print("{} {} {}\n", name, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
    if (o.pass == (expected.count(name) > 0)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
