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

#include <array>
#include <cstdint>
#include <optional>

#include "coavoid/crypto.h"
#include "coavoid/finematch/params.h"

// Blinded point-in-circle test. The patient encodes the two endpoints p1, p2
// of a diameter of its contact circle under a one-time affine mask mod p;
// the user folds its own point u into a blinded response; the patient strips
// the mask and learns only the sign of r * (u - p1).(u - p2), which is
// negative exactly when u is strictly inside the circle.
namespace coavoid::finematch {

// Non-negative fixed-point coordinates, one unit per metre in the simulator.
struct FixedPoint {
  int64_t x = 0;
  int64_t y = 0;

  bool operator==(const FixedPoint&) const = default;
};

struct DiameterPair {
  FixedPoint p1;
  FixedPoint p2;

  bool operator==(const DiameterPair&) const = default;
};

// p1 = anchor - d, p2 = anchor + d with d = round(radius * (cos, sin)
// (heading)). Rounding is symmetric so p1 + p2 = 2 anchor exactly. Throws
// kCoordinateOverflow unless both endpoints lie in [0, 2^coord_bits).
DiameterPair MakeDiameterPair(FixedPoint anchor, int64_t radius,
                              double heading_rad, int coord_bits);

// Plain-integer reference: (u - p1).(u - p2).
int64_t DiameterDot(const DiameterPair& pair, FixedPoint u);

// s and the seven masks a_1..a_7 of one encryption. Move-only. The masks
// are handed out once; a second EncryptAnchor with the same secrets throws
// kSecretsConsumed.
class AnchorSecrets {
 public:
  static AnchorSecrets Generate(const FineGrainParams& params,
                                RandomSource& rng);
  static AnchorSecrets FromValues(mpz_class s, std::array<mpz_class, 7> masks);

  AnchorSecrets(AnchorSecrets&&) noexcept = default;
  AnchorSecrets& operator=(AnchorSecrets&&) noexcept = default;
  AnchorSecrets(const AnchorSecrets&) = delete;
  AnchorSecrets& operator=(const AnchorSecrets&) = delete;

  const mpz_class& s() const { return s_; }
  bool consumed() const { return !masks_.has_value(); }

  // Hands the masks out and forgets them.
  std::array<mpz_class, 7> TakeMasks();

 private:
  AnchorSecrets(mpz_class s, std::array<mpz_class, 7> masks)
      : s_(std::move(s)), masks_(std::move(masks)) {}

  mpz_class s_;
  std::optional<std::array<mpz_class, 7>> masks_;
};

struct EncryptedAnchor {
  std::array<mpz_class, 7> en;

  bool operator==(const EncryptedAnchor&) const = default;
};

// en1..en7 = s (x1 a + a1), s (y1 a + a2), s (x2 a + a3), s (y2 a + a4),
//            s (x1 x2 a + a5), s (y1 y2 a + a6), s (a + a7)   (mod p)
// with a = alpha. Throws kSanityCheckFailed if the result fails
// PassesSanityChecks, kCoordinateOverflow for endpoints outside the domain.
EncryptedAnchor EncryptAnchor(const FineGrainParams& params,
                              AnchorSecrets& secrets, const DiameterPair& pair);

// en1 + en3, en2 + en4 and en7 all non-zero mod p.
bool PassesSanityChecks(const FineGrainParams& params,
                        const EncryptedAnchor& anchor);

struct UserResponse {
  mpz_class a1;
  mpz_class a2;
  // The blind stays on the user's device; only a1 and a2 are sent.
  mpz_class r;
};

// a1 = r alpha (xu (en1 + en3) + yu (en2 + en4))          mod p
// a2 = r alpha (en5 + en6 + (xu^2 + yu^2) en7)             mod p
// with a fresh k4-bit r. Throws kCoordinateOverflow.
UserResponse Respond(const FineGrainParams& params,
                     const EncryptedAnchor& anchor, FixedPoint user,
                     RandomSource& rng);
// Same with a caller-chosen blind.
UserResponse RespondWithBlind(const FineGrainParams& params,
                              const EncryptedAnchor& anchor, FixedPoint user,
                              const mpz_class& r);

enum class Verdict { kInside, kOutside };

struct Decision {
  Verdict verdict = Verdict::kOutside;
  // c2 - c1 = r (u - p1).(u - p2).
  mpz_class quantity;
};

// b_i = s^-1 a_i mod p, c_i = floor(b_i / alpha^2), D = c2 - c1,
// inside iff D < 0. Throws kNoiseOverflow when a b_i cannot have come from
// an in-range response.
Decision Decide(const FineGrainParams& params, const AnchorSecrets& secrets,
                const UserResponse& response);

// Length-prefixed big-endian residues.
Bytes SerializeAnchor(const EncryptedAnchor& anchor);
EncryptedAnchor ParseAnchor(ByteReader& reader);
Bytes SerializeResponse(const UserResponse& response);
UserResponse ParseResponse(ByteSpan bytes);

}  // namespace coavoid::finematch
