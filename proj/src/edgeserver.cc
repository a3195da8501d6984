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

#include "coavoid/edgeserver.h"

#include <algorithm>

#include "coavoid/error.h"

namespace coavoid::edgeserver {

filter::RecombinedRecord ToRecombined(const StoredRecord& r) {
  return {r.rpi, r.cell_digest, r.coarse_time, r.multiplicity};
}

ObfuscatedStore::ObfuscatedStore(RandomSource& rng, int retention_days)
    : rng_(rng),
      retention_days_(retention_days),
      published_(std::make_shared<const std::vector<StoredRecord>>()) {
  COAVOID_ENFORCE(retention_days >= 0, ErrorCode::kConfigInvalid,
                  "negative retention");
}

UploadReceipt ObfuscatedStore::AcceptUpload(
    std::span<const filter::RecombinedRecord> payload) {
  COAVOID_ENFORCE(!payload.empty(), ErrorCode::kMalformedPayload,
                  "empty upload");
  for (const auto& r : payload) {
    COAVOID_ENFORCE(r.coarse_time.interval >= 1 &&
                        r.coarse_time.interval <= keysched::kIntervalsPerDay,
                    ErrorCode::kMalformedPayload,
                    "interval " + std::to_string(r.coarse_time.interval));
    COAVOID_ENFORCE(r.multiplicity >= 1, ErrorCode::kMalformedPayload,
                    "zero multiplicity");
  }
  std::lock_guard lock(mu_);
  for (const auto& r : payload) {
    pending_.push_back({rng_.NextU64(),
                        {r.rpi, r.cell_digest, r.coarse_time, r.multiplicity, 0}});
  }
  return {payload.size()};
}

Snapshot ObfuscatedStore::Publish(int64_t now) {
  std::lock_guard publish_lock(publish_mu_);
  std::vector<Pending> batch;
  Snapshot previous;
  uint64_t epoch;
  {
    std::lock_guard lock(mu_);
    batch.swap(pending_);
    previous = published_;
    epoch = epoch_ + 1;
  }
  const int64_t oldest_day =
      keysched::IntervalOf(now).day_index - retention_days_;
  for (auto& p : batch) p.record.epoch = epoch;
  std::vector<Pending> all;
  all.reserve(previous->size() + batch.size());
  {
    // The RandomSource is shared with AcceptUpload.
    std::lock_guard lock(mu_);
    for (const auto& r : *previous) all.push_back({rng_.NextU64(), r});
  }
  all.insert(all.end(), batch.begin(), batch.end());
  std::erase_if(all, [&](const Pending& p) {
    return p.record.coarse_time.day_index < oldest_day;
  });
  std::sort(all.begin(), all.end(), [](const Pending& a, const Pending& b) {
    return a.sequence_key < b.sequence_key;
  });
  auto next = std::make_shared<std::vector<StoredRecord>>();
  next->reserve(all.size());
  for (const auto& p : all) next->push_back(p.record);
  std::lock_guard lock(mu_);
  published_ = std::move(next);
  epoch_ = epoch;
  return published_;
}

std::vector<StoredRecord> ObfuscatedStore::Download(uint64_t since_epoch) const {
  Snapshot snap;
  uint64_t epoch;
  {
    std::lock_guard lock(mu_);
    snap = published_;
    epoch = epoch_;
  }
  COAVOID_ENFORCE(since_epoch <= epoch, ErrorCode::kEpochFromFuture,
                  "since_epoch " + std::to_string(since_epoch) +
                      " > current " + std::to_string(epoch));
  std::vector<StoredRecord> out;
  for (const auto& r : *snap) {
    if (r.epoch > since_epoch) out.push_back(r);
  }
  return out;
}

uint64_t ObfuscatedStore::epoch() const {
  std::lock_guard lock(mu_);
  return epoch_;
}

size_t ObfuscatedStore::pending() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

size_t ObfuscatedStore::live() const {
  std::lock_guard lock(mu_);
  return published_->size();
}

Snapshot ObfuscatedStore::snapshot() const {
  std::lock_guard lock(mu_);
  return published_;
}

std::string_view RoleName(Role r) {
  return r == Role::kPatient ? "patient" : "user";
}

Role ParseRole(std::string_view s) {
  if (s == "patient") return Role::kPatient;
  if (s == "user") return Role::kUser;
  Throw(ErrorCode::kMalformedPayload, "role '" + std::string(s) + "'");
}

std::string_view DirectionName(Direction d) {
  return d == Direction::kPatientToUser ? "patient_to_user" : "user_to_patient";
}

Direction ParseDirection(std::string_view s) {
  if (s == "patient_to_user") return Direction::kPatientToUser;
  if (s == "user_to_patient") return Direction::kUserToPatient;
  Throw(ErrorCode::kMalformedPayload, "direction '" + std::string(s) + "'");
}

uint64_t RelayHub::Register(const SessionId& session, Role role) {
  std::lock_guard lock(mu_);
  uint64_t id = next_member_++;
  sessions_[session].emplace(id, Member{role, {}});
  return id;
}

size_t RelayHub::Relay(const RelayEnvelope& envelope) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(envelope.session_id);
  COAVOID_ENFORCE(it != sessions_.end(), ErrorCode::kUnknownSession,
                  ToHex(envelope.session_id));
  Role target = envelope.direction == Direction::kPatientToUser
                    ? Role::kUser
                    : Role::kPatient;
  size_t delivered = 0;
  for (auto& [id, member] : it->second) {
    if (member.role != target) continue;
    member.mailbox.push_back(envelope);
    ++delivered;
  }
  return delivered;
}

std::vector<RelayEnvelope> RelayHub::Poll(const SessionId& session, Role role,
                                          uint64_t member) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session);
  COAVOID_ENFORCE(it != sessions_.end(), ErrorCode::kUnknownSession,
                  ToHex(session));
  auto m = it->second.find(member);
  COAVOID_ENFORCE(m != it->second.end() && m->second.role == role,
                  ErrorCode::kUnknownSession,
                  "member " + std::to_string(member) + " of " + ToHex(session));
  std::vector<RelayEnvelope> out;
  out.swap(m->second.mailbox);
  return out;
}

void RelayHub::Leave(const SessionId& session, uint64_t member) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) return;
  it->second.erase(member);
  if (it->second.empty()) sessions_.erase(it);
}

void RelayHub::Close(const SessionId& session) {
  std::lock_guard lock(mu_);
  sessions_.erase(session);
}

size_t RelayHub::sessions() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

size_t RelayHub::queued() const {
  std::lock_guard lock(mu_);
  size_t n = 0;
  for (const auto& [sid, s] : sessions_) {
    for (const auto& [id, m] : s) n += m.mailbox.size();
  }
  return n;
}

}  // namespace coavoid::edgeserver
