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

#include "coavoid/finematch/session.h"

#include <cmath>

#include "coavoid/error.h"
#include "coavoid/finematch/bigint.h"

namespace coavoid::finematch {

namespace {

using Nonce = std::array<uint8_t, 12>;

uint64_t TagOf(ByteSpan agreement_public) {
  Digest32 d = Sha256(agreement_public);
  uint64_t tag = 0;
  for (int i = 0; i < 8; ++i) tag = (tag << 8) | d[i];
  return tag;
}

Digest32 ChannelKey(const Digest32& shared, const SessionId& sid) {
  return Sha256({AsBytes("coavoid-channel"), sid, shared});
}

Bytes Aad(MessageType type, const SessionId& sid, uint64_t tag) {
  Bytes aad = {static_cast<uint8_t>(type)};
  Append(aad, sid);
  AppendU64(aad, tag);
  return aad;
}

// type || tag || [prefix] || nonce || LP(ciphertext)
Bytes Sealed(MessageType type, const SessionId& sid, uint64_t tag,
             const Digest32& key, ByteSpan prefix, ByteSpan plaintext,
             RandomSource& rng) {
  Nonce nonce = rng.Array<12>();
  Bytes out = {static_cast<uint8_t>(type)};
  AppendU64(out, tag);
  Append(out, prefix);
  Append(out, nonce);
  AppendLengthPrefixed(out, AesGcmSeal(key, nonce, Aad(type, sid, tag), plaintext));
  return out;
}

Bytes OpenSealed(ByteReader& reader, MessageType type, const SessionId& sid,
                 uint64_t tag, const Digest32& key) {
  Nonce nonce = reader.Fixed<12>();
  auto ct = reader.LengthPrefixed();
  COAVOID_ENFORCE(reader.done(), ErrorCode::kMalformedPayload,
                  "trailing bytes in relay message");
  return AesGcmOpen(key, nonce, Aad(type, sid, tag), ct);
}

}  // namespace

SessionId SessionIdFor(const filter::RecombinedRecord& record) {
  Bytes when;
  AppendU64(when, static_cast<uint64_t>(record.coarse_time.day_index));
  AppendU32(when, static_cast<uint32_t>(record.coarse_time.interval));
  Digest32 d = Sha256({AsBytes("coavoid-sid"), record.rpi,
                       record.cell_digest.digest, when});
  SessionId sid{};
  std::copy_n(d.begin(), sid.size(), sid.begin());
  return sid;
}

FixedPoint ToFixedPoint(double x_m, double y_m, int coord_bits) {
  const double offset = std::ldexp(1.0, coord_bits - 1);
  return {static_cast<int64_t>(std::llround(x_m + offset)),
          static_cast<int64_t>(std::llround(y_m + offset))};
}

PatientSession::PatientSession(const FineGrainParams& params,
                               const CryptoSuite& suite,
                               const KeyPair& signing_key, SessionId session_id,
                               FixedPoint position, PatientSessionConfig config)
    : params_(params),
      suite_(suite),
      signing_key_(signing_key),
      session_id_(session_id),
      position_(position),
      config_(config) {}

std::optional<PatientSession::Outcome> PatientSession::OnMessage(
    ByteSpan payload, int64_t now, RandomSource& rng) {
  ByteReader reader(payload);
  auto type = static_cast<MessageType>(reader.U8());
  if (type == MessageType::kJoin) {
    auto user_pub = reader.LengthPrefixed();
    COAVOID_ENFORCE(reader.done(), ErrorCode::kMalformedPayload,
                    "trailing bytes in JOIN");
    uint64_t tag = TagOf(user_pub);
    if (peers_.count(tag)) return std::nullopt;
    KeyPair eph = suite_.GenerateAgreementKey(rng);
    Digest32 key = ChannelKey(suite_.Agree(eph.secret_key, user_pub), session_id_);
    // Fresh masks and s for every user.
    AnchorSecrets secrets = AnchorSecrets::Generate(params_, rng);
    DiameterPair pair = MakeDiameterPair(position_, config_.contact_radius,
                                         config_.heading_rad,
                                         params_.bits.coord_bits);
    EncryptedAnchor anchor;
    while (true) {
      try {
        anchor = EncryptAnchor(params_, secrets, pair);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSanityCheckFailed) throw;
        secrets = AnchorSecrets::Generate(params_, rng);
      }
    }
    Announcement ann = SignAnnouncement(params_, anchor, suite_,
                                        signing_key_.secret_key, now, session_id_);
    Bytes prefix;
    AppendLengthPrefixed(prefix, eph.public_key);
    AppendLengthPrefixed(prefix, signing_key_.public_key);
    Bytes reply = Sealed(MessageType::kAnnounce, session_id_, tag, key, prefix,
                         SerializeAnnouncement(ann), rng);
    peers_.emplace(tag, Peer{key, std::move(secrets)});
    return Outcome{std::move(reply), std::nullopt};
  }
  if (type == MessageType::kResponse) {
    uint64_t tag = reader.U64();
    auto it = peers_.find(tag);
    if (it == peers_.end() || it->second.decided) return std::nullopt;
    Bytes plain = OpenSealed(reader, MessageType::kResponse, session_id_, tag,
                             it->second.channel_key);
    Decision d = Decide(params_, it->second.secrets, ParseResponse(plain));
    it->second.decided = true;
    uint8_t bit = d.verdict == Verdict::kInside ? 1 : 0;
    Bytes reply = Sealed(MessageType::kVerdict, session_id_, tag,
                         it->second.channel_key, {}, ByteSpan(&bit, 1), rng);
    return Outcome{std::move(reply), std::move(d)};
  }
  return std::nullopt;
}

UserSession::UserSession(const CryptoSuite& suite, const BitLengths& bits,
                         SessionId session_id, FixedPoint position,
                         RandomSource& rng, int64_t max_announcement_age)
    : suite_(suite),
      bits_(bits),
      session_id_(session_id),
      position_(position),
      max_age_(max_announcement_age),
      agreement_(suite.GenerateAgreementKey(rng)),
      tag_(TagOf(agreement_.public_key)) {}

Bytes UserSession::Join() const {
  Bytes out = {static_cast<uint8_t>(MessageType::kJoin)};
  AppendLengthPrefixed(out, agreement_.public_key);
  return out;
}

std::optional<Bytes> UserSession::OnMessage(ByteSpan payload, int64_t now,
                                            RandomSource& rng) {
  if (rejected_ || contact_.has_value()) return std::nullopt;
  ByteReader reader(payload);
  auto type = static_cast<MessageType>(reader.U8());
  if (type != MessageType::kAnnounce && type != MessageType::kVerdict) {
    return std::nullopt;
  }
  if (reader.U64() != tag_) return std::nullopt;
  if (type == MessageType::kAnnounce) {
    if (channel_key_) return std::nullopt;
    auto patient_eph = reader.LengthPrefixed();
    auto patient_signing = reader.LengthPrefixed();
    Digest32 key =
        ChannelKey(suite_.Agree(agreement_.secret_key, patient_eph), session_id_);
    Announcement ann;
    try {
      ann = ParseAnnouncement(
          OpenSealed(reader, MessageType::kAnnounce, session_id_, tag_, key));
    } catch (const Error&) {
      rejected_ = true;
      return std::nullopt;
    }
    if (ann.session_id != session_id_ ||
        !VerifyAnnouncement(ann, suite_, patient_signing, now, max_age_)) {
      rejected_ = true;
      return std::nullopt;
    }
    channel_key_ = key;
    if (BitLength(ann.p) != bits_.k1 || BitLength(ann.alpha) != bits_.k2) {
      rejected_ = true;
      return std::nullopt;
    }
    FineGrainParams params{bits_, ann.p, ann.alpha};
    UserResponse resp = Respond(params, ann.anchor, position_, rng);
    return Sealed(MessageType::kResponse, session_id_, tag_, key, {},
                  SerializeResponse(resp), rng);
  }
  if (!channel_key_) return std::nullopt;
  Bytes plain =
      OpenSealed(reader, MessageType::kVerdict, session_id_, tag_, *channel_key_);
  COAVOID_ENFORCE(plain.size() == 1 && plain[0] <= 1, ErrorCode::kMalformedPayload,
                  "bad verdict");
  contact_ = plain[0] == 1;
  return std::nullopt;
}

}  // namespace coavoid::finematch
