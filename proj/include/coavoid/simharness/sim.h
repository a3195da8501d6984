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

#include "coavoid/simharness/config.h"
#include "coavoid/simharness/report.h"

// Seeded random-walk world: agents visit places, exchange identifiers with
// whoever else is there, get diagnosed, upload, and every device verifies the
// published records through the coarse and fine stages. A ground-truth ledger
// of within-radius contacts is kept beside the protocol path.
namespace coavoid::simharness {

// Runs the CoAvoid pipeline. Ignores config.attacks. Throws kConfigInvalid.
MetricsReport Run(const SimConfig& config);

// Same world trajectory as Run, but the server stores one record per
// broadcast interval of the last 14 days for every patient. The report's
// upload and server columns describe that strategy.
MetricsReport RunBaseline(const SimConfig& config);

// Runs with every scenario in config.attacks active (at least one required)
// and reports what the attackers achieved. Throws kScenarioInvalid.
AttackReport RunAttack(const SimConfig& config);

// Simulates config.days, then times per-user verification of the final
// published dataset for both strategies on sample_users devices.
BenchReport Bench(const SimConfig& config, int sample_users);

}  // namespace coavoid::simharness
