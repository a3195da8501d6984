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

#include "coavoid/finematch/announcement.h"

#include "coavoid/error.h"
#include "coavoid/finematch/bigint.h"

namespace coavoid::finematch {

Bytes AnnouncementMessage(const Announcement& a) {
  Bytes out;
  AppendLengthPrefixed(out, ToBytes(a.p));
  AppendLengthPrefixed(out, ToBytes(a.alpha));
  Append(out, SerializeAnchor(a.anchor));
  AppendU64(out, static_cast<uint64_t>(a.timestamp));
  Append(out, a.session_id);
  return out;
}

Announcement SignAnnouncement(const FineGrainParams& params,
                              const EncryptedAnchor& anchor,
                              const CryptoSuite& suite, ByteSpan secret_key,
                              int64_t timestamp, const SessionId& session_id) {
  Announcement a{params.p, params.alpha, anchor, timestamp, session_id, {}};
  a.signature = suite.Sign(secret_key, AnnouncementMessage(a));
  return a;
}

bool VerifyAnnouncement(const Announcement& a, const CryptoSuite& suite,
                        ByteSpan public_key, int64_t now,
                        int64_t max_age_seconds) {
  if (a.timestamp > now + max_age_seconds || now - a.timestamp > max_age_seconds) {
    return false;
  }
  if (a.p <= 0 || a.alpha <= 0) return false;
  FineGrainParams shape{{}, a.p, a.alpha};
  if (!PassesSanityChecks(shape, a.anchor)) return false;
  return suite.Verify(public_key, AnnouncementMessage(a), a.signature);
}

Bytes SerializeAnnouncement(const Announcement& a) {
  Bytes out = AnnouncementMessage(a);
  AppendLengthPrefixed(out, a.signature);
  return out;
}

Announcement ParseAnnouncement(ByteSpan bytes) {
  ByteReader reader(bytes);
  Announcement a;
  a.p = FromBytes(reader.LengthPrefixed());
  a.alpha = FromBytes(reader.LengthPrefixed());
  a.anchor = ParseAnchor(reader);
  a.timestamp = static_cast<int64_t>(reader.U64());
  a.session_id = reader.Fixed<16>();
  auto sig = reader.LengthPrefixed();
  a.signature.assign(sig.begin(), sig.end());
  COAVOID_ENFORCE(reader.done(), ErrorCode::kMalformedPayload,
                  "trailing bytes after announcement");
  return a;
}

}  // namespace coavoid::finematch
