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
#include <optional>

#include "coavoid/filter.h"
#include "coavoid/finematch/announcement.h"
#include "coavoid/finematch/protocol.h"
#include "coavoid/finematch/suite.h"

// Fine-grained matching over the edge server's relay. Both parties derive
// the session id from the matched record, so the patient can subscribe to
// its own uploads in advance. Messages (first byte is the type):
//
//   JOIN      user -> patient   user's ephemeral agreement key
//   ANNOUNCE  patient -> user   patient keys, sealed signed announcement
//   RESPONSE  user -> patient   sealed (a1, a2)
//   VERDICT   patient -> user   sealed inside/outside bit
//
// ANNOUNCE, RESPONSE and VERDICT carry an 8-byte tag naming the user they
// belong to, and are sealed with AES-256-GCM under a key from ephemeral key
// agreement between that user and the patient.
namespace coavoid::finematch {

enum class MessageType : uint8_t {
  kJoin = 1,
  kAnnounce = 2,
  kResponse = 3,
  kVerdict = 4,
};

SessionId SessionIdFor(const filter::RecombinedRecord& record);

// Fixed-point mapping of a planar offset from the region centroid: metres,
// shifted by 2^(coord_bits - 1) on both axes.
FixedPoint ToFixedPoint(double x_m, double y_m, int coord_bits);

struct PatientSessionConfig {
  int64_t contact_radius = 10;
  double heading_rad = 0.0;
};

class PatientSession {
 public:
  // position is where the patient was during the record's interval.
  PatientSession(const FineGrainParams& params, const CryptoSuite& suite,
                 const KeyPair& signing_key, SessionId session_id,
                 FixedPoint position, PatientSessionConfig config = {});

  struct Outcome {
    Bytes reply;
    // Set once a response has been decided.
    std::optional<Decision> decision;
  };

  // Handles JOIN and RESPONSE; returns nullopt for messages it ignores
  // (duplicates, unknown tags, other types). Throws for malformed payloads.
  std::optional<Outcome> OnMessage(ByteSpan payload, int64_t now,
                                   RandomSource& rng);

  const SessionId& session_id() const { return session_id_; }

 private:
  struct Peer {
    Digest32 channel_key;
    AnchorSecrets secrets;
    bool decided = false;
  };

  const FineGrainParams& params_;
  const CryptoSuite& suite_;
  const KeyPair& signing_key_;
  SessionId session_id_;
  FixedPoint position_;
  PatientSessionConfig config_;
  std::map<uint64_t, Peer> peers_;
};

class UserSession {
 public:
  // bits must match the patient's parameter set; p and alpha come from the
  // announcement.
  UserSession(const CryptoSuite& suite, const BitLengths& bits,
              SessionId session_id, FixedPoint position, RandomSource& rng,
              int64_t max_announcement_age = 3600);

  Bytes Join() const;

  // Handles ANNOUNCE (returns the RESPONSE) and VERDICT (returns nullopt and
  // records the result). Messages for other users are ignored. A failed
  // announcement check ends the session with rejected() set.
  std::optional<Bytes> OnMessage(ByteSpan payload, int64_t now,
                                 RandomSource& rng);

  // Inside the contact radius, once the verdict has arrived.
  std::optional<bool> contact() const { return contact_; }
  bool rejected() const { return rejected_; }
  const SessionId& session_id() const { return session_id_; }

 private:
  const CryptoSuite& suite_;
  BitLengths bits_;
  SessionId session_id_;
  FixedPoint position_;
  int64_t max_age_;
  KeyPair agreement_;
  uint64_t tag_;
  std::optional<Digest32> channel_key_;
  std::optional<bool> contact_;
  bool rejected_ = false;
};

}  // namespace coavoid::finematch
