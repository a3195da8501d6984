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

#include <gmpxx.h>

#include <cstdint>

#include "coavoid/finematch/protocol.h"
#include "coavoid/finematch/suite.h"

namespace coavoid::finematch {

using SessionId = Key16;

// What the patient pushes to matched users: the public modulus and alpha,
// the encrypted anchor, a timestamp and the session id, signed.
struct Announcement {
  mpz_class p;
  mpz_class alpha;
  EncryptedAnchor anchor;
  int64_t timestamp = 0;
  SessionId session_id{};
  Bytes signature;
};

// The signed byte string: p, alpha, en1..en7 each length-prefixed
// big-endian, then an 8-byte timestamp and the 16-byte session id.
Bytes AnnouncementMessage(const Announcement& a);

Announcement SignAnnouncement(const FineGrainParams& params,
                              const EncryptedAnchor& anchor,
                              const CryptoSuite& suite, ByteSpan secret_key,
                              int64_t timestamp, const SessionId& session_id);

// True iff the signature verifies, |now - timestamp| <= max_age_seconds and
// the anchor passes the sanity checks.
bool VerifyAnnouncement(const Announcement& a, const CryptoSuite& suite,
                        ByteSpan public_key, int64_t now,
                        int64_t max_age_seconds);

// AnnouncementMessage || length-prefixed signature. Parse throws
// kMalformedPayload.
Bytes SerializeAnnouncement(const Announcement& a);
Announcement ParseAnnouncement(ByteSpan bytes);

}  // namespace coavoid::finematch
