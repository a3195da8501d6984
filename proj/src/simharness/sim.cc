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

#include "coavoid/simharness/sim.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "coavoid/devicelog.h"
#include "coavoid/edgeserver.h"
#include "coavoid/error.h"
#include "coavoid/filter.h"
#include "coavoid/finematch/coarse.h"
#include "coavoid/finematch/session.h"
#include "coavoid/geocell.h"
#include "coavoid/keysched.h"
#include "coavoid/riskscore.h"

namespace coavoid::simharness {

namespace {

using devicelog::ExchangeRecord;
using edgeserver::Direction;
using edgeserver::Role;
using filter::RecombinedRecord;
using finematch::FixedPoint;
using finematch::SessionId;
using keysched::IntervalTime;
using keysched::kIntervalsPerDay;
using keysched::kIntervalSeconds;
using keysched::kSecondsPerDay;

constexpr int64_t kBeaconSeconds = 120;
constexpr double kBeaconMinutes = 2.0;
constexpr int64_t kAnnouncementMaxAge = 3600;

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class Health { kHealthy, kSuspected, kSick };

struct Offset {
  int64_t dx = 0;
  int64_t dy = 0;
};

struct Visit {
  int place = 0;
  int first = 1;  // intervals, inclusive
  int last = 1;
  Offset offset;
};

struct Place {
  geocell::CellDigest digest;
  FixedPoint origin;
};

struct TruthContact {
  int partner = 0;
  int64_t timestamp = 0;
  bool within = false;
};

struct Agent {
  Health health = Health::kHealthy;
  bool uploaded = false;
  int upload_day = -1;
  int diagnosed_day = -1;
  devicelog::DeviceLog log;
  // Absolute interval -> (place, position) while visiting a place.
  std::map<int64_t, std::pair<int, FixedPoint>> whereabouts;
  geocell::CellDigest home_digest;
  std::vector<Visit> today;
  std::array<Key16, kIntervalsPerDay> rpis{};
  std::vector<TruthContact> truth;
  std::unique_ptr<DeterministicRandom> rng;
  std::optional<finematch::KeyPair> signing_key;
};

struct PatientEntry {
  int owner = 0;
  uint64_t member = 0;
  std::unique_ptr<finematch::PatientSession> session;
};

// An identifier re-emitted by an attacker: delivered at an absolute interval.
struct PendingEmission {
  int64_t at = 0;
  int emit_place = 0;
  int tapped = 0;
  Key16 rpi{};
};

struct KeyLess {
  bool operator()(const Key16& a, const Key16& b) const { return a < b; }
};

class Engine {
 public:
  Engine(const SimConfig& config, Strategy strategy, bool with_attacks)
      : config_(config),
        strategy_(strategy),
        with_attacks_(with_attacks),
        indexer_(config.region),
        projection_(config.region),
        suite_(finematch::MakeSuite(config.suite)),
        server_rng_(config.seed, "server"),
        store_(server_rng_),
        baseline_rng_(config.seed, "baseline-server"),
        baseline_store_(baseline_rng_) {
    ValidateConfig(config);
    const auto& bits = config.param_set == "toy" ? finematch::kToyBitLengths
                                                 : finematch::kDefaultBitLengths;
    DeterministicRandom param_rng(config.seed, "params");
    params_ = finematch::GenParams(bits, param_rng);
    BuildPlaces();
    BuildAgents();
    if (with_attacks_) CheckScenarios();
    report_.strategy = strategy;
    report_.seed = config.seed;
    report_.users = config.users;
  }

  void RunDays() {
    const auto t0 = Clock::now();
    for (int d = 0; d < config_.days; ++d) RunDay(d);
    report_.timings.total_seconds = Since(t0);
  }

  MetricsReport& report() { return report_; }
  AttackReport& attack() { return attack_; }

  BenchReport Bench(int sample_users);

 private:
  int64_t DayIndex(int d) const { return config_.start_day + d; }

  std::mt19937_64 Stream(const std::string& label) const {
    DeterministicRandom r(config_.seed, label);
    return std::mt19937_64(r.NextU64());
  }

  void BuildPlaces() {
    auto gen = Stream("places");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int bits = params_.bits.coord_bits;
    for (int i = 0; i < config_.places; ++i) {
      // Uniform over the city disc.
      const double r = config_.city_radius_m * std::sqrt(unit(gen));
      const double theta = 2 * M_PI * unit(gen);
      geocell::PlanarPoint pp{r * std::cos(theta), r * std::sin(theta)};
      geocell::GeoPoint gp = projection_.Unproject(pp);
      Place place;
      place.digest = geocell::HideLocation(indexer_, gp, config_.resolution);
      place.origin = finematch::ToFixedPoint(pp.x, pp.y, bits);
      places_.push_back(place);
    }
  }

  void BuildAgents() {
    agents_.resize(config_.users);
    auto gen = Stream("homes");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int a = 0; a < config_.users; ++a) {
      auto& agent = agents_[a];
      agent.rng = std::make_unique<DeterministicRandom>(
          config_.seed, fmt::format("protocol/{}", a));
      const double r = config_.city_radius_m * std::sqrt(unit(gen));
      const double theta = 2 * M_PI * unit(gen);
      agent.home_digest = geocell::HideLocation(
          indexer_, projection_.Unproject({r * std::cos(theta), r * std::sin(theta)}),
          config_.resolution);
    }
  }

  void CheckScenarios() {
    COAVOID_ENFORCE(!config_.attacks.empty(), ErrorCode::kScenarioInvalid,
                    "no attack scenarios configured");
    for (const auto& s : config_.attacks) {
      if (s.kind != AttackKind::kWormhole) continue;
      for (int e : s.emit_places) {
        const bool same_cell = places_[e].digest == places_[s.tap_place].digest;
        COAVOID_ENFORCE(!same_cell || s.directional, ErrorCode::kScenarioInvalid,
                        fmt::format("wormhole emit place {} shares the tap "
                                    "place's cell; set directional", e));
      }
    }
    attack_.scenario = config_.attacks.front();
  }

  keysched::DailyTracingKey Dtk(int a, int64_t day_index) const {
    DeterministicRandom r(config_.seed, fmt::format("dtk/{}/{}", a, day_index));
    return keysched::GenerateDailyTracingKey(day_index, r);
  }

  FixedPoint PositionOf(const Visit& v) const {
    const auto& o = places_[v.place].origin;
    return {o.x + v.offset.dx, o.y + v.offset.dy};
  }

  static int64_t Dist2(FixedPoint a, FixedPoint b) {
    return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
  }

  void Move(int d) {
    const int64_t day = DayIndex(d);
    const int span = config_.last_active_interval - config_.first_active_interval + 1;
    const auto radius = static_cast<int64_t>(std::floor(config_.place_radius_m));
    occupancy_.assign(static_cast<size_t>(config_.places) * kIntervalsPerDay, {});
    for (int a = 0; a < config_.users; ++a) {
      auto& agent = agents_[a];
      agent.rpis = keysched::DeriveDayRpis(Dtk(a, day));
      agent.today.clear();
      auto gen = Stream(fmt::format("walk/{}/{}", a, d));
      // Everyone leaves home at least once a day.
      int k = 0;
      if (config_.visits_per_day >= 1) {
        std::poisson_distribution<int> extra(config_.visits_per_day - 1);
        k = 1 + extra(gen);
      } else if (config_.visits_per_day > 0) {
        std::poisson_distribution<int> visits(config_.visits_per_day);
        k = visits(gen);
      }
      std::uniform_int_distribution<int> place(0, config_.places - 1);
      std::uniform_int_distribution<int> length(
          1, std::min(config_.max_visit_intervals, span));
      std::uniform_int_distribution<int64_t> coord(-radius, radius);
      std::vector<bool> busy(kIntervalsPerDay + 1, false);
      for (int tries = 0; tries < 4 * k && static_cast<int>(agent.today.size()) < k;
           ++tries) {
        Visit v;
        const int len = length(gen);
        std::uniform_int_distribution<int> start(config_.first_active_interval,
                                                 config_.last_active_interval - len + 1);
        v.first = start(gen);
        v.last = v.first + len - 1;
        v.place = place(gen);
        do {
          v.offset = {coord(gen), coord(gen)};
        } while (v.offset.dx * v.offset.dx + v.offset.dy * v.offset.dy >
                 radius * radius);
        bool clash = false;
        for (int i = v.first; i <= v.last; ++i) clash = clash || busy[i];
        if (clash) continue;
        for (int i = v.first; i <= v.last; ++i) busy[i] = true;
        agent.today.push_back(v);
      }
      std::sort(agent.today.begin(), agent.today.end(),
                [](const Visit& x, const Visit& y) { return x.first < y.first; });
      for (size_t vi = 0; vi < agent.today.size(); ++vi) {
        const auto& v = agent.today[vi];
        for (int i = v.first; i <= v.last; ++i) {
          occupancy_[Slot(v.place, i)].push_back({a, static_cast<int>(vi)});
          agent.whereabouts[IntervalTime{day, i}.Absolute()] = {v.place, PositionOf(v)};
        }
      }
    }
  }

  size_t Slot(int place, int interval) const {
    return static_cast<size_t>(place) * kIntervalsPerDay + (interval - 1);
  }

  int Rssi(double distance_m, std::mt19937_64& gen) const {
    std::normal_distribution<double> noise(0.0, config_.rssi_noise_db);
    return devicelog::SyntheticRssi(distance_m,
                                    config_.rssi_noise_db > 0 ? noise(gen) : 0.0);
  }

  void Contacts(int d) {
    const int64_t day = DayIndex(d);
    const int64_t r2 = config_.contact_radius_m * config_.contact_radius_m;
    for (int a = 0; a < config_.users; ++a) {
      auto gen = Stream(fmt::format("contact/{}/{}", a, d));
      std::poisson_distribution<int> partners(config_.contacts_per_visit);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::uniform_int_distribution<int64_t> second(0, kIntervalSeconds - 1);
      for (const auto& v : agents_[a].today) {
        // (partner, partner visit) pairs present during the visit.
        std::set<std::pair<int, int>> present;
        for (int i = v.first; i <= v.last; ++i) {
          for (const auto& p : occupancy_[Slot(v.place, i)]) {
            if (p.first != a) present.insert(p);
          }
        }
        std::vector<std::pair<int, int>> pool(present.begin(), present.end());
        std::shuffle(pool.begin(), pool.end(), gen);
        const int m = std::min<int>(partners(gen), static_cast<int>(pool.size()));
        for (int j = 0; j < m; ++j) {
          const int b = pool[j].first;
          const Visit& w = agents_[b].today[pool[j].second];
          const int lo = std::max(v.first, w.first);
          const int hi = std::min(v.last, w.last);
          std::uniform_int_distribution<int> pick(lo, hi);
          const int64_t t0 =
              keysched::IntervalStart({day, pick(gen)}) + second(gen);
          const int64_t t_end = keysched::IntervalStart({day, hi}) + kIntervalSeconds;
          int beacons = 1;
          while (unit(gen) < config_.beacon_continue) ++beacons;
          const FixedPoint pa = PositionOf(v), pb = PositionOf(w);
          const double dist = std::sqrt(static_cast<double>(Dist2(pa, pb)));
          const bool within = Dist2(pa, pb) < r2;
          const auto& digest = places_[v.place].digest;
          for (int k = 0; k < beacons; ++k) {
            const int64_t t = t0 + k * kBeaconSeconds;
            if (t >= t_end) break;
            const int interval = keysched::IntervalOf(t).interval;
            agents_[a].log.RecordExchange(t, agents_[b].rpis[interval - 1], digest,
                                          Rssi(dist, gen));
            agents_[b].log.RecordExchange(t, agents_[a].rpis[interval - 1], digest,
                                          Rssi(dist, gen));
            agents_[a].truth.push_back({b, t, within});
            agents_[b].truth.push_back({a, t, within});
          }
        }
      }
    }
  }

  void Inject(int victim, int tapped, const Key16& rpi, int emit_place,
              int64_t t, std::mt19937_64& gen, const AttackScenario& s) {
    agents_[victim].log.RecordExchange(t, rpi, places_[emit_place].digest,
                                       Rssi(s.emit_distance_m, gen));
    injected_.insert({victim, rpi});
    ++attack_.injections;
    (void)tapped;
  }

  void Attacks(int d) {
    if (!with_attacks_) return;
    const int64_t day = DayIndex(d);
    const int64_t r2 = config_.contact_radius_m * config_.contact_radius_m;
    for (size_t si = 0; si < config_.attacks.size(); ++si) {
      const auto& s = config_.attacks[si];
      auto gen = Stream(fmt::format("attack/{}/{}", si, d));
      std::uniform_int_distribution<int64_t> second(0, kIntervalSeconds - 1);
      // Deliver what is due today, then capture today's identifiers.
      auto& queue = pending_[si];
      std::vector<PendingEmission> later;
      for (const auto& e : queue) {
        const IntervalTime when = IntervalTime::FromAbsolute(e.at);
        if (when.day_index != day) {
          if (when.day_index > day) later.push_back(e);
          continue;
        }
        for (const auto& [victim, _] : occupancy_[Slot(e.emit_place, when.interval)]) {
          if (victim == e.tapped) continue;
          Inject(victim, e.tapped, e.rpi, e.emit_place,
                 keysched::IntervalStart(when) + second(gen), gen, s);
        }
      }
      queue = std::move(later);
      for (int i = config_.first_active_interval; i <= config_.last_active_interval; ++i) {
        for (const auto& [tapped, tv] : occupancy_[Slot(s.tap_place, i)]) {
          const Key16& rpi = agents_[tapped].rpis[i - 1];
          const FixedPoint tapped_pos = PositionOf(agents_[tapped].today[tv]);
          for (int e : s.emit_places) {
            if (s.kind == AttackKind::kReplay) {
              queue.push_back({IntervalTime{day, i}.Absolute() + s.delay_intervals,
                               e, tapped, rpi});
              continue;
            }
            for (const auto& [victim, vv] : occupancy_[Slot(e, i)]) {
              if (victim == tapped) continue;
              if (s.directional &&
                  Dist2(PositionOf(agents_[victim].today[vv]), tapped_pos) < r2) {
                continue;
              }
              Inject(victim, tapped, rpi, e,
                     keysched::IntervalStart({day, i}) + second(gen), gen, s);
            }
          }
        }
      }
      // Same-day replays can already be delivered.
      std::vector<PendingEmission> keep;
      for (const auto& e : queue) {
        const IntervalTime when = IntervalTime::FromAbsolute(e.at);
        if (when.day_index != day) {
          keep.push_back(e);
          continue;
        }
        for (const auto& [victim, _] : occupancy_[Slot(e.emit_place, when.interval)]) {
          if (victim == e.tapped) continue;
          Inject(victim, e.tapped, e.rpi, e.emit_place,
                 keysched::IntervalStart(when) + second(gen), gen, s);
        }
      }
      queue = std::move(keep);
    }
  }

  std::vector<devicelog::BroadcastRecord> Broadcasts(int a, int d) const {
    std::vector<devicelog::BroadcastRecord> out;
    const int64_t day = DayIndex(d);
    for (int64_t dd = day - keysched::kRetentionDays + 1; dd <= day; ++dd) {
      auto rpis = keysched::DeriveDayRpis(Dtk(a, dd));
      for (int i = 1; i <= kIntervalsPerDay; ++i) {
        out.push_back({keysched::IntervalStart({dd, i}), rpis[i - 1]});
      }
    }
    return out;
  }

  // One record per broadcast interval of the last 14 days, stamped with
  // wherever the device was.
  std::vector<RecombinedRecord> BaselineRecords(int a, int d) const {
    std::vector<RecombinedRecord> out;
    for (const auto& b : Broadcasts(a, d)) {
      RecombinedRecord r;
      r.rpi = b.rpi;
      r.coarse_time = keysched::IntervalOf(b.timestamp);
      auto it = agents_[a].whereabouts.find(r.coarse_time.Absolute());
      r.cell_digest = it == agents_[a].whereabouts.end()
                          ? agents_[a].home_digest
                          : places_[it->second.first].digest;
      out.push_back(r);
    }
    std::sort(out.begin(), out.end(), filter::UploadOrder);
    return out;
  }

  int64_t EndOfDay(int d) const { return (DayIndex(d) + 1) * kSecondsPerDay - 1; }

  void Diagnose(int d) {
    if (d >= static_cast<int>(config_.patient_fraction.size())) return;
    const auto count = static_cast<size_t>(
        std::llround(config_.patient_fraction[d] * config_.users));
    std::vector<int> candidates;
    for (int a = 0; a < config_.users; ++a) {
      if (agents_[a].health != Health::kSick) candidates.push_back(a);
    }
    auto gen = Stream(fmt::format("diagnose/{}", d));
    std::shuffle(candidates.begin(), candidates.end(), gen);
    candidates.resize(std::min(count, candidates.size()));
    for (int a : candidates) {
      agents_[a].health = Health::kSick;
      agents_[a].diagnosed_day = d;
    }
  }

  std::vector<int> Upload(int d, DayMetrics& m) {
    std::vector<int> uploaders;
    const int64_t now = EndOfDay(d);
    for (int a = 0; a < config_.users; ++a) {
      auto& agent = agents_[a];
      if (agent.health != Health::kSick || agent.uploaded || agent.diagnosed_day > d) {
        continue;
      }
      uploaders.push_back(a);
      const auto t0 = Clock::now();
      auto broadcasts = Broadcasts(a, d);
      auto records = filter::DedupePolicy(
          filter::FilterAndRecombine(agent.log.exchanges(), broadcasts));
      report_.timings.filter_seconds.push_back(Since(t0));
      auto baseline = BaselineRecords(a, d);
      const auto coavoid_bytes =
          static_cast<int64_t>(filter::SerializeUpload(records).size());
      const auto baseline_bytes =
          static_cast<int64_t>(filter::SerializeUpload(baseline).size());
      m.coavoid_upload_bytes += coavoid_bytes;
      m.baseline_upload_bytes += baseline_bytes;
      if (strategy_ == Strategy::kCoAvoid) {
        m.upload_records += static_cast<int64_t>(records.size());
        m.upload_bytes += coavoid_bytes;
      } else {
        m.upload_records += static_cast<int64_t>(baseline.size());
        m.upload_bytes += baseline_bytes;
        baseline_store_.AcceptUpload(baseline);
      }
      if (!records.empty()) store_.AcceptUpload(records);
      if (!agent.signing_key) agent.signing_key = suite_->GenerateSigningKey(*agent.rng);
      for (const auto& r : records) {
        const SessionId sid = finematch::SessionIdFor(r);
        auto where = agent.whereabouts.find(r.coarse_time.Absolute());
        COAVOID_ENFORCE(where != agent.whereabouts.end(), ErrorCode::kConfigInvalid,
                        "patient record outside any visit");
        PatientEntry entry;
        entry.owner = a;
        entry.member = hub_.Register(sid, Role::kPatient);
        finematch::PatientSessionConfig pc;
        pc.contact_radius = config_.contact_radius_m;
        entry.session = std::make_unique<finematch::PatientSession>(
            params_, *suite_, *agent.signing_key, sid, where->second.second, pc);
        patients_.emplace(sid, std::move(entry));
      }
      agent.uploaded = true;
      agent.upload_day = d;
      ++m.new_patients;
      (void)now;
    }
    return uploaders;
  }

  // Runs the relay exchange for one matched record; nullopt if the
  // announcement was rejected.
  std::optional<finematch::Decision> FineMatch(int a, const RecombinedRecord& record,
                                               const ExchangeRecord& exchange,
                                               int64_t now) {
    const SessionId sid = finematch::SessionIdFor(record);
    auto pit = patients_.find(sid);
    if (pit == patients_.end()) return std::nullopt;
    auto& patient = pit->second;
    auto& agent = agents_[a];
    auto where = agent.whereabouts.find(keysched::IntervalOf(exchange.timestamp).Absolute());
    COAVOID_ENFORCE(where != agent.whereabouts.end(), ErrorCode::kConfigInvalid,
                    "exchange outside any visit");
    finematch::UserSession user(*suite_, params_.bits, sid, where->second.second,
                                *agent.rng, kAnnouncementMaxAge);
    const uint64_t member = hub_.Register(sid, Role::kUser);
    hub_.Relay({sid, Direction::kUserToPatient, user.Join(), now});
    std::optional<finematch::Decision> decision;
    for (int round = 0; round < 4 && !user.contact() && !user.rejected(); ++round) {
      for (auto& env : hub_.Poll(sid, Role::kPatient, patient.member)) {
        auto out = patient.session->OnMessage(env.payload, now,
                                              *agents_[patient.owner].rng);
        if (!out) continue;
        if (out->decision) decision = std::move(out->decision);
        hub_.Relay({sid, Direction::kPatientToUser, std::move(out->reply), now});
      }
      for (auto& env : hub_.Poll(sid, Role::kUser, member)) {
        if (auto reply = user.OnMessage(env.payload, now, *agent.rng)) {
          hub_.Relay({sid, Direction::kUserToPatient, std::move(*reply), now});
        }
      }
    }
    hub_.Leave(sid, member);
    if (!user.contact()) return std::nullopt;
    // The user's verdict and the patient's decision come from one exchange.
    COAVOID_ENFORCE(decision.has_value() &&
                        (decision->verdict == finematch::Verdict::kInside) ==
                            *user.contact(),
                    ErrorCode::kCryptoFailure, "verdict mismatch");
    return decision;
  }

  struct VerifyResult {
    std::set<int> confirmed_patients;
    std::map<int, std::vector<riskscore::Exposure>> exposures;
    std::map<int, int64_t> last_contact;
  };

  VerifyResult Verify(int a, const std::vector<RecombinedRecord>& fresh, int64_t now,
                      DayMetrics* m) {
    VerifyResult out;
    const auto& exchanges = agents_[a].log.exchanges();
    auto matches = finematch::CoarseMatchRecords(exchanges, fresh);
    std::set<size_t> done_records;
    for (const auto& match : matches) {
      const auto& ex = exchanges[match.exchange];
      const auto& rec = fresh[match.record];
      const bool injected = injected_.count({a, ex.rpi}) != 0;
      if (m) {
        switch (match.kind) {
          case finematch::CoarseClass::kHit:
            ++m->coarse_hits;
            break;
          case finematch::CoarseClass::kWormholeSuspect:
            ++m->wormhole_suspects;
            break;
          case finematch::CoarseClass::kReplaySuspect:
            ++m->replay_suspects;
            break;
        }
      }
      if (injected && m) LogCoarse(match, ex, rec);
      if (match.kind != finematch::CoarseClass::kHit) continue;
      if (!done_records.insert(match.record).second) continue;
      auto decision = FineMatch(a, rec, ex, now);
      if (m) ++m->fine_sessions;
      if (injected && m) {
        ++attack_.fine_sessions;
        if (decision) attack_.log_lines.push_back(finematch::FinalLogLine(*decision));
        if (!decision || decision->verdict != finematch::Verdict::kInside) {
          ++attack_.fine_rejected;
        }
      }
      if (!decision || decision->verdict != finematch::Verdict::kInside) continue;
      if (m) ++m->fine_inside;
      const int owner = patients_.at(finematch::SessionIdFor(rec)).owner;
      out.confirmed_patients.insert(owner);
      // Every beacon behind this record counts towards exposure.
      for (const auto& e : exchanges) {
        if (e.rpi != rec.rpi || e.cell_digest != rec.cell_digest) continue;
        out.exposures[owner].push_back({kBeaconMinutes, e.rssi});
        auto& last = out.last_contact[owner];
        last = std::max(last, e.timestamp);
      }
    }
    return out;
  }

  void LogCoarse(const finematch::CoarseMatch& match, const ExchangeRecord& ex,
                 const RecombinedRecord& rec) {
    if (match.kind == finematch::CoarseClass::kReplaySuspect) {
      attack_.log_lines.push_back(finematch::TimestampLogLine(
          rec.coarse_time, keysched::IntervalOf(ex.timestamp), false));
      return;
    }
    attack_.log_lines.push_back(
        finematch::LocationLogLine(rec.cell_digest, ex.cell_digest));
  }

  std::set<std::pair<int, int>> GroundTruth(const std::vector<int>& uploaders,
                                            int64_t now) const {
    std::set<std::pair<int, int>> truth;
    const int64_t window = now - devicelog::kRetentionSeconds;
    for (int p : uploaders) {
      for (const auto& c : agents_[p].truth) {
        if (c.within && c.timestamp >= window) truth.insert({c.partner, p});
      }
    }
    return truth;
  }

  void RunDay(int d) {
    DayMetrics m;
    m.day = d;
    const int64_t now = EndOfDay(d);
    Move(d);
    Contacts(d);
    Attacks(d);

    Diagnose(d);
    std::vector<int> uploaders = Upload(d, m);
    store_.Publish(now);
    std::vector<RecombinedRecord> fresh;
    for (const auto& r : store_.Download(last_epoch_)) {
      fresh.push_back(edgeserver::ToRecombined(r));
    }
    last_epoch_ = store_.epoch();
    if (strategy_ == Strategy::kBaseline) {
      baseline_store_.Publish(now);
      m.server_records = static_cast<int64_t>(baseline_store_.live());
    } else {
      m.server_records = static_cast<int64_t>(store_.live());
    }

    std::set<std::pair<int, int>> detected;
    if (!fresh.empty()) {
      for (int a = 0; a < config_.users; ++a) {
        const auto t0 = Clock::now();
        VerifyResult v = Verify(a, fresh, now, &m);
        report_.timings.verify_seconds.push_back(Since(t0));
        if (v.confirmed_patients.empty()) continue;
        for (int p : v.confirmed_patients) detected.insert({a, p});
        // Risk over all patients confirmed today.
        std::vector<riskscore::Exposure> all;
        int64_t last = 0;
        for (auto& [p, ex] : v.exposures) {
          all.insert(all.end(), ex.begin(), ex.end());
          last = std::max(last, v.last_contact[p]);
        }
        const int days_since = static_cast<int>(
            DayIndex(d) - keysched::IntervalOf(last).day_index);
        auto factors = riskscore::DeriveFactors(all, days_since,
                                                config_.transmission_level, config_.risk);
        if (riskscore::ShouldWarn(riskscore::RiskScore(factors), config_.risk)) {
          ++m.warnings;
        }
        if (agents_[a].health == Health::kHealthy) {
          agents_[a].health = Health::kSuspected;
        }
      }
    }

    auto truth = GroundTruth(uploaders, now);
    m.true_contacts = static_cast<int>(truth.size());
    m.detected_contacts = static_cast<int>(detected.size());
    for (const auto& pair : detected) {
      if (!truth.count(pair)) ++m.false_contacts;
    }
    for (const auto& pair : truth) {
      if (!detected.count(pair)) ++m.missed_contacts;
    }
    attack_.false_contacts += m.false_contacts;
    attack_.wormhole_suspects += m.wormhole_suspects;
    attack_.replay_suspects += m.replay_suspects;

    // Suspected devices turn sick at the configured rate and upload at the
    // end of the next day.
    auto gen = Stream(fmt::format("convert/{}", d));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& agent : agents_) {
      if (agent.health != Health::kSuspected) continue;
      if (unit(gen) < config_.infection_rate) {
        agent.health = Health::kSick;
        agent.diagnosed_day = d + 1;
      }
    }
    for (auto& agent : agents_) {
      agent.log.Prune(now);
      const int64_t oldest = IntervalTime{DayIndex(d) - keysched::kRetentionDays, 1}.Absolute();
      agent.whereabouts.erase(agent.whereabouts.begin(),
                              agent.whereabouts.lower_bound(oldest));
      switch (agent.health) {
        case Health::kHealthy:
          ++m.healthy;
          break;
        case Health::kSuspected:
          ++m.suspected;
          break;
        case Health::kSick:
          ++m.sick;
          break;
      }
    }
    report_.days.push_back(m);
  }

  const SimConfig& config_;
  Strategy strategy_;
  bool with_attacks_;
  geocell::PlanarHexIndexer indexer_;
  geocell::LocalProjection projection_;
  std::unique_ptr<finematch::CryptoSuite> suite_;
  finematch::FineGrainParams params_;
  DeterministicRandom server_rng_;
  edgeserver::ObfuscatedStore store_;
  DeterministicRandom baseline_rng_;
  edgeserver::ObfuscatedStore baseline_store_;
  edgeserver::RelayHub hub_;
  uint64_t last_epoch_ = 0;
  std::vector<Place> places_;
  std::vector<Agent> agents_;
  std::vector<std::vector<std::pair<int, int>>> occupancy_;
  std::map<SessionId, PatientEntry, KeyLess> patients_;
  std::set<std::pair<int, Key16>> injected_;
  std::map<size_t, std::vector<PendingEmission>> pending_;
  MetricsReport report_;
  AttackReport attack_;
};

BenchReport Engine::Bench(int sample_users) {
  COAVOID_ENFORCE(sample_users >= 1, ErrorCode::kConfigInvalid,
                  "sample_users must be positive");
  BenchReport out;
  out.users = config_.users;
  out.days = config_.days;
  const int last_day = config_.days - 1;
  const int64_t now = EndOfDay(last_day);

  // The published datasets as a device downloads them.
  std::vector<RecombinedRecord> coavoid;
  if (auto snap = store_.snapshot()) {
    for (const auto& r : *snap) coavoid.push_back(edgeserver::ToRecombined(r));
  }
  std::vector<RecombinedRecord> baseline;
  for (int a = 0; a < config_.users; ++a) {
    if (!agents_[a].uploaded) continue;
    auto recs = BaselineRecords(a, agents_[a].upload_day);
    baseline.insert(baseline.end(), recs.begin(), recs.end());
  }
  const std::string coavoid_text = filter::SerializeUpload(coavoid);
  const std::string baseline_text = filter::SerializeUpload(baseline);
  out.coavoid_records = static_cast<int64_t>(coavoid.size());
  out.baseline_records = static_cast<int64_t>(baseline.size());
  out.coavoid_dataset_bytes = static_cast<int64_t>(coavoid_text.size());
  out.baseline_dataset_bytes = static_cast<int64_t>(baseline_text.size());

  // Evenly spaced devices.
  std::vector<int> sample;
  const int n = std::min(sample_users, config_.users);
  for (int i = 0; i < n; ++i) {
    sample.push_back(static_cast<int>(static_cast<int64_t>(i) * config_.users / n));
  }
  double coavoid_total = 0, baseline_total = 0;
  for (int a : sample) {
    auto t0 = Clock::now();
    auto records = filter::ParseUpload(coavoid_text);
    auto before = attack_.fine_sessions;
    DayMetrics scratch;
    Verify(a, records, now, &scratch);
    (void)before;
    out.fine_sessions += scratch.fine_sessions;
    coavoid_total += Since(t0);

    t0 = Clock::now();
    auto all = filter::ParseUpload(baseline_text);
    std::unordered_multimap<Key16, size_t, ArrayHash> heard;
    const auto& exchanges = agents_[a].log.exchanges();
    for (size_t i = 0; i < exchanges.size(); ++i) heard.emplace(exchanges[i].rpi, i);
    int64_t hits = 0;
    for (const auto& r : all) {
      auto [lo, hi] = heard.equal_range(r.rpi);
      for (auto it = lo; it != hi; ++it) {
        hits += devicelog::ValidateTimestamp(exchanges[it->second], r.coarse_time);
      }
    }
    baseline_total += Since(t0);
    (void)hits;
  }
  out.sampled_users = n;
  out.coavoid_seconds_per_user = coavoid_total / n;
  out.baseline_seconds_per_user = baseline_total / n;
  out.ratio = out.baseline_seconds_per_user > 0
                  ? out.coavoid_seconds_per_user / out.baseline_seconds_per_user
                  : 0.0;
  return out;
}

}  // namespace

MetricsReport Run(const SimConfig& config) {
  Engine engine(config, Strategy::kCoAvoid, false);
  engine.RunDays();
  return std::move(engine.report());
}

MetricsReport RunBaseline(const SimConfig& config) {
  Engine engine(config, Strategy::kBaseline, false);
  engine.RunDays();
  return std::move(engine.report());
}

AttackReport RunAttack(const SimConfig& config) {
  Engine engine(config, Strategy::kCoAvoid, true);
  engine.RunDays();
  AttackReport out = std::move(engine.attack());
  out.metrics = std::move(engine.report());
  return out;
}

BenchReport Bench(const SimConfig& config, int sample_users) {
  Engine engine(config, Strategy::kCoAvoid, false);
  engine.RunDays();
  return engine.Bench(sample_users);
}

}  // namespace coavoid::simharness
