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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "coavoid/crypto.h"
#include "coavoid/filter.h"

// The edge server: an honest-but-curious aggregation point. Uploaded records
// are held without any notion of who uploaded them, re-shuffled on every
// publication, and served to downloaders by epoch. Fine-grained matching
// messages pass through an opaque relay.
namespace coavoid::edgeserver {

// Everything the server keeps about a published record.
struct StoredRecord {
  Key16 rpi{};
  geocell::CellDigest cell_digest;
  keysched::IntervalTime coarse_time;
  uint32_t multiplicity = 1;
  uint64_t epoch = 0;

  bool operator==(const StoredRecord&) const = default;
};

filter::RecombinedRecord ToRecombined(const StoredRecord& r);

struct UploadReceipt {
  size_t accepted = 0;
};

using Snapshot = std::shared_ptr<const std::vector<StoredRecord>>;

// Uploads become visible at the next Publish. Each uploaded record is tagged
// with a random 64-bit sequence key S; Publish orders the whole live set by
// S, throws the keys away and stamps new records with the new epoch. Carried
// over records get fresh keys, so every publication is an independent
// shuffle. Thread-safe; publications are serialized.
class ObfuscatedStore {
 public:
  explicit ObfuscatedStore(RandomSource& rng,
                           int retention_days = keysched::kRetentionDays);

  // Throws kMalformedPayload on an empty payload or a record with an
  // interval outside 1..96 or a zero multiplicity.
  UploadReceipt AcceptUpload(std::span<const filter::RecombinedRecord> payload);

  // now is UTC seconds; records whose day is more than retention_days before
  // now's day are dropped.
  Snapshot Publish(int64_t now);

  // Records first published in epochs (since_epoch, epoch()], in the current
  // publication order. Throws kEpochFromFuture.
  std::vector<StoredRecord> Download(uint64_t since_epoch) const;

  uint64_t epoch() const;
  size_t pending() const;
  size_t live() const;
  Snapshot snapshot() const;

 private:
  struct Pending {
    uint64_t sequence_key;
    StoredRecord record;
  };

  RandomSource& rng_;
  int retention_days_;
  mutable std::mutex mu_;
  std::mutex publish_mu_;
  std::vector<Pending> pending_;
  Snapshot published_;
  uint64_t epoch_ = 0;
};

using SessionId = Key16;

enum class Role { kPatient, kUser };
enum class Direction { kPatientToUser, kUserToPatient };

std::string_view RoleName(Role r);
Role ParseRole(std::string_view s);
std::string_view DirectionName(Direction d);
Direction ParseDirection(std::string_view s);

struct RelayEnvelope {
  SessionId session_id{};
  Direction direction = Direction::kPatientToUser;
  Bytes payload;
  int64_t timestamp = 0;

  bool operator==(const RelayEnvelope&) const = default;
};

// Mailboxes for fine-grained matching. A party registers for a session under
// a role and receives a member id; Relay copies an envelope into the mailbox
// of every member on the receiving side. Poll hands mailbox contents over and
// forgets them. Payloads are never inspected. Thread-safe.
class RelayHub {
 public:
  uint64_t Register(const SessionId& session, Role role);

  // Returns the number of mailboxes the envelope was copied into. Throws
  // kUnknownSession for a session nobody registered.
  size_t Relay(const RelayEnvelope& envelope);

  // Throws kUnknownSession for an unknown session or member.
  std::vector<RelayEnvelope> Poll(const SessionId& session, Role role,
                                  uint64_t member);

  // Drops one member and its mailbox; the session goes away with its last
  // member. Unknown ids are ignored.
  void Leave(const SessionId& session, uint64_t member);
  void Close(const SessionId& session);

  size_t sessions() const;
  // Envelopes sitting in mailboxes, across all sessions.
  size_t queued() const;

 private:
  struct Member {
    Role role;
    std::vector<RelayEnvelope> mailbox;
  };
  using Session = std::map<uint64_t, Member>;

  mutable std::mutex mu_;
  std::map<SessionId, Session> sessions_;
  uint64_t next_member_ = 1;
};

}  // namespace coavoid::edgeserver
