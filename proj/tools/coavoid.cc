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

#include <csignal>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "coavoid/crypto.h"
#include "coavoid/edgeserver.h"
#include "coavoid/edgeserver_service.h"
#include "coavoid/error.h"
#include "coavoid/simharness/config.h"
#include "coavoid/simharness/report.h"
#include "coavoid/simharness/sim.h"

namespace {

using namespace coavoid;

volatile std::sig_atomic_t g_stop = 0;
void OnSignal(int) { g_stop = 1; }

struct SimArgs {
  std::string config;
  int users = -1;
  int places = -1;
  int days = -1;
  long long seed = -1;
  double infection_rate = -1;
  int resolution = -1;
  std::string out = "out";
  bool baseline = false;
};

simharness::SimConfig BaseConfig(const std::string& path) {
  if (path.empty()) return {};
  return simharness::LoadConfig(path);
}

int DoSim(const SimArgs& a) {
  auto config = BaseConfig(a.config);
  if (a.users >= 0) config.users = a.users;
  if (a.places >= 0) config.places = a.places;
  if (a.days >= 0) config.days = a.days;
  if (a.seed >= 0) config.seed = static_cast<uint64_t>(a.seed);
  if (a.infection_rate >= 0) config.infection_rate = a.infection_rate;
  if (a.resolution >= 0) config.resolution = a.resolution;
  auto report = a.baseline ? simharness::RunBaseline(config)
                           : simharness::Run(config);
  simharness::EmitMetrics(report, a.out);
  std::cout << simharness::SummaryJson(report) << "\n";
  return 0;
}

int DoAttack(const std::string& scenario, const std::string& config_path,
             const std::string& out) {
  auto config = BaseConfig(config_path);
  auto kind = simharness::ParseAttackKind(scenario);
  std::vector<simharness::AttackScenario> keep;
  for (const auto& s : config.attacks)
    if (s.kind == kind) keep.push_back(s);
  if (keep.empty()) {
    simharness::AttackScenario s;
    s.kind = kind;
    // A replay stays where it was captured; a wormhole moves elsewhere.
    if (kind == simharness::AttackKind::kReplay) s.emit_places = {s.tap_place};
    keep.push_back(s);
  }
  config.attacks = keep;
  auto report = simharness::RunAttack(config);
  simharness::EmitAttack(report, out);
  std::cout << simharness::AttackJson(report) << "\n";
  return 0;
}

int DoBench(int users, int days, int sample, const std::string& config_path) {
  auto config = BaseConfig(config_path);
  config.users = users;
  config.places = std::max(50, users / 20);
  config.days = days;
  auto report = simharness::Bench(config, sample);
  std::cout << simharness::BenchJson(report) << "\n";
  return 0;
}

int DoServe(const std::string& bind, int port, long long epoch_seconds,
            int retention_days) {
  SecureRandom rng;
  edgeserver::ObfuscatedStore store(rng, retention_days);
  edgeserver::RelayHub relay;
  edgeserver::Service service(store, relay,
                              [] { return static_cast<int64_t>(std::time(nullptr)); });
  edgeserver::ServerOptions options;
  options.bind_address = bind;
  options.port = static_cast<uint16_t>(port);
  options.epoch_seconds = epoch_seconds;
  edgeserver::TcpServer server(service, options);
  server.Start();
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  fmt::print(stderr, "listening on {}:{}\n", bind, server.port());
  while (!g_stop) {
    struct timespec ts{0, 200'000'000};
    nanosleep(&ts, nullptr);
  }
  server.Stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coavoid"};
  app.require_subcommand(1);

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "run the population simulator");
  sim_cmd->add_option("--config", sim.config, "JSON config file");
  sim_cmd->add_option("--users", sim.users);
  sim_cmd->add_option("--places", sim.places);
  sim_cmd->add_option("--days", sim.days);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--infection-rate", sim.infection_rate);
  sim_cmd->add_option("--resolution", sim.resolution);
  sim_cmd->add_option("--out", sim.out, "output directory");
  sim_cmd->add_flag("--baseline", sim.baseline,
                    "serve the unfiltered per-interval upload instead");

  std::string scenario, attack_config, attack_out = "out";
  auto* attack_cmd = app.add_subcommand("attack", "run an attack scenario");
  attack_cmd->add_option("--scenario", scenario)
      ->required()
      ->check(CLI::IsMember({"wormhole", "replay"}));
  attack_cmd->add_option("--config", attack_config);
  attack_cmd->add_option("--out", attack_out);

  int bench_users = 10000, bench_days = 3, bench_sample = 50;
  std::string bench_config;
  auto* bench_cmd = app.add_subcommand("bench", "per-user verification time");
  bench_cmd->add_option("--users", bench_users);
  bench_cmd->add_option("--days", bench_days);
  bench_cmd->add_option("--sample", bench_sample, "users timed");
  bench_cmd->add_option("--config", bench_config);

  std::string bind = "127.0.0.1";
  int port = edgeserver::kDefaultPort;
  long long epoch_seconds = 3600;
  int retention_days = keysched::kRetentionDays;
  auto* serve_cmd = app.add_subcommand("serve", "run the edge server");
  serve_cmd->add_option("--bind", bind);
  serve_cmd->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--epoch-seconds", epoch_seconds);
  serve_cmd->add_option("--retention-days", retention_days);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim_cmd) return DoSim(sim);
    if (*attack_cmd) return DoAttack(scenario, attack_config, attack_out);
    if (*bench_cmd) return DoBench(bench_users, bench_days, bench_sample, bench_config);
    if (*serve_cmd) return DoServe(bind, port, epoch_seconds, retention_days);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 1;
}
