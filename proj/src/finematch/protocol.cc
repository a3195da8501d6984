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

#include "coavoid/finematch/protocol.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coavoid/error.h"
#include "coavoid/finematch/bigint.h"

namespace coavoid::finematch {

namespace {

void CheckCoordinate(int64_t v, int coord_bits, const char* what) {
  COAVOID_ENFORCE(v >= 0 && v < (int64_t{1} << coord_bits),
                  ErrorCode::kCoordinateOverflow,
                  fmt::format("{} = {} outside [0, 2^{})", what, v, coord_bits));
}

mpz_class Z(int64_t v) { return mpz_class(static_cast<long>(v)); }

mpz_class Mod(const mpz_class& v, const mpz_class& m) {
  mpz_class out;
  mpz_mod(out.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
  return out;
}

}  // namespace

DiameterPair MakeDiameterPair(FixedPoint anchor, int64_t radius,
                              double heading_rad, int coord_bits) {
  COAVOID_ENFORCE(radius >= 0, ErrorCode::kCoordinateOverflow,
                  "negative radius");
  const auto dx =
      static_cast<int64_t>(std::llround(radius * std::cos(heading_rad)));
  const auto dy =
      static_cast<int64_t>(std::llround(radius * std::sin(heading_rad)));
  DiameterPair pair{{anchor.x - dx, anchor.y - dy},
                    {anchor.x + dx, anchor.y + dy}};
  CheckCoordinate(pair.p1.x, coord_bits, "p1.x");
  CheckCoordinate(pair.p1.y, coord_bits, "p1.y");
  CheckCoordinate(pair.p2.x, coord_bits, "p2.x");
  CheckCoordinate(pair.p2.y, coord_bits, "p2.y");
  return pair;
}

int64_t DiameterDot(const DiameterPair& pair, FixedPoint u) {
  return (u.x - pair.p1.x) * (u.x - pair.p2.x) +
         (u.y - pair.p1.y) * (u.y - pair.p2.y);
}

AnchorSecrets AnchorSecrets::Generate(const FineGrainParams& params,
                                      RandomSource& rng) {
  // s in [2^(k1/2), p): at least k1/2 bits, non-zero, hence invertible.
  mpz_class low = mpz_class(1) << (params.bits.k1 / 2);
  mpz_class s = low + RandomBelow(rng, params.p - low);
  std::array<mpz_class, 7> masks;
  for (auto& a : masks) a = RandomBits(rng, params.bits.k3);
  return AnchorSecrets(std::move(s), std::move(masks));
}

AnchorSecrets AnchorSecrets::FromValues(mpz_class s,
                                        std::array<mpz_class, 7> masks) {
  return AnchorSecrets(std::move(s), std::move(masks));
}

std::array<mpz_class, 7> AnchorSecrets::TakeMasks() {
  COAVOID_ENFORCE(masks_.has_value(), ErrorCode::kSecretsConsumed,
                  "one-time masks already used");
  auto out = std::move(*masks_);
  masks_.reset();
  return out;
}

EncryptedAnchor EncryptAnchor(const FineGrainParams& params,
                              AnchorSecrets& secrets, const DiameterPair& pair) {
  const int beta = params.bits.coord_bits;
  CheckCoordinate(pair.p1.x, beta, "p1.x");
  CheckCoordinate(pair.p1.y, beta, "p1.y");
  CheckCoordinate(pair.p2.x, beta, "p2.x");
  CheckCoordinate(pair.p2.y, beta, "p2.y");
  COAVOID_ENFORCE(Mod(secrets.s(), params.p) != 0, ErrorCode::kSanityCheckFailed,
                  "s is not invertible");
  const auto a = secrets.TakeMasks();
  const mpz_class& alpha = params.alpha;
  const mpz_class x1 = Z(pair.p1.x), y1 = Z(pair.p1.y);
  const mpz_class x2 = Z(pair.p2.x), y2 = Z(pair.p2.y);
  const std::array<mpz_class, 7> plain = {
      x1 * alpha + a[0],      y1 * alpha + a[1],      x2 * alpha + a[2],
      y2 * alpha + a[3],      x1 * x2 * alpha + a[4], y1 * y2 * alpha + a[5],
      alpha + a[6]};
  EncryptedAnchor out;
  for (size_t i = 0; i < plain.size(); ++i) {
    out.en[i] = Mod(secrets.s() * plain[i], params.p);
  }
  COAVOID_ENFORCE(PassesSanityChecks(params, out), ErrorCode::kSanityCheckFailed,
                  "degenerate anchor; draw new secrets");
  return out;
}

bool PassesSanityChecks(const FineGrainParams& params,
                        const EncryptedAnchor& anchor) {
  const auto& en = anchor.en;
  for (const auto& v : en) {
    if (v < 0 || v >= params.p) return false;
  }
  return Mod(en[0] + en[2], params.p) != 0 &&
         Mod(en[1] + en[3], params.p) != 0 && en[6] != 0;
}

UserResponse Respond(const FineGrainParams& params,
                     const EncryptedAnchor& anchor, FixedPoint user,
                     RandomSource& rng) {
  return RespondWithBlind(params, anchor, user,
                          RandomExactBits(rng, params.bits.k4));
}

UserResponse RespondWithBlind(const FineGrainParams& params,
                              const EncryptedAnchor& anchor, FixedPoint user,
                              const mpz_class& r) {
  CheckCoordinate(user.x, params.bits.coord_bits, "user.x");
  CheckCoordinate(user.y, params.bits.coord_bits, "user.y");
  const auto& en = anchor.en;
  const mpz_class xu = Z(user.x), yu = Z(user.y);
  const mpz_class blind = r * params.alpha;
  UserResponse out;
  out.a1 = Mod(blind * (xu * (en[0] + en[2]) + yu * (en[1] + en[3])), params.p);
  out.a2 = Mod(blind * (en[4] + en[5] + (xu * xu + yu * yu) * en[6]), params.p);
  out.r = r;
  return out;
}

Decision Decide(const FineGrainParams& params, const AnchorSecrets& secrets,
                const UserResponse& response) {
  mpz_class s_inv;
  COAVOID_ENFORCE(mpz_invert(s_inv.get_mpz_t(), secrets.s().get_mpz_t(),
                             params.p.get_mpz_t()) != 0,
                  ErrorCode::kSanityCheckFailed, "s is not invertible");
  const mpz_class alpha_sq = params.alpha * params.alpha;
  const int max_bits = std::max(ConstraintLhs(params.bits, 1),
                                ConstraintLhs(params.bits, 2)) + 1;
  auto recover = [&](const mpz_class& a, const char* which) {
    mpz_class b = Mod(s_inv * a, params.p);
    COAVOID_ENFORCE(
        mpz_divisible_p(b.get_mpz_t(), params.alpha.get_mpz_t()) != 0 &&
            BitLength(b) <= max_bits,
        ErrorCode::kNoiseOverflow,
        fmt::format("{} decodes to a {}-bit value outside the response range",
                    which, BitLength(b)));
    mpz_class c;
    mpz_fdiv_q(c.get_mpz_t(), b.get_mpz_t(), alpha_sq.get_mpz_t());
    return c;
  };
  const mpz_class c1 = recover(response.a1, "a1");
  const mpz_class c2 = recover(response.a2, "a2");
  Decision d;
  d.quantity = c2 - c1;
  d.verdict = d.quantity < 0 ? Verdict::kInside : Verdict::kOutside;
  return d;
}

Bytes SerializeAnchor(const EncryptedAnchor& anchor) {
  Bytes out;
  for (const auto& v : anchor.en) AppendLengthPrefixed(out, ToBytes(v));
  return out;
}

EncryptedAnchor ParseAnchor(ByteReader& reader) {
  EncryptedAnchor out;
  for (auto& v : out.en) v = FromBytes(reader.LengthPrefixed());
  return out;
}

Bytes SerializeResponse(const UserResponse& response) {
  Bytes out;
  AppendLengthPrefixed(out, ToBytes(response.a1));
  AppendLengthPrefixed(out, ToBytes(response.a2));
  return out;
}

UserResponse ParseResponse(ByteSpan bytes) {
  ByteReader reader(bytes);
  UserResponse out;
  out.a1 = FromBytes(reader.LengthPrefixed());
  out.a2 = FromBytes(reader.LengthPrefixed());
  COAVOID_ENFORCE(reader.done(), ErrorCode::kMalformedPayload,
                  "trailing bytes after response");
  return out;
}

}  // namespace coavoid::finematch
