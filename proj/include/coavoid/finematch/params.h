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

#include <optional>
#include <string>

#include "coavoid/crypto.h"

namespace coavoid::finematch {

// Bit lengths of the blinded point-in-circle protocol: p has k1 bits, alpha
// k2 bits, each one-time mask a_j k3 bits, the user's blind r k4 bits, and
// every coordinate lies in [0, 2^coord_bits).
struct BitLengths {
  int k1 = 0;
  int k2 = 0;
  int k3 = 0;
  int k4 = 0;
  int coord_bits = 0;

  bool operator==(const BitLengths&) const = default;
};

// Recovery is exact iff all three hold:
//   1: k4 + max(2 k2 + 2 beta + 2, k2 + beta + k3 + 2)     < k1
//   2: k4 + max(2 k2 + 2 beta + 2, k2 + 2 beta + 1 + k3)   < k1
//   3: k4 + k3 + 2 beta + 2                                < k2
// (1) and (2) keep responses below p; (3) keeps the mask noise below alpha.
int ConstraintLhs(const BitLengths& b, int which);
int ConstraintRhs(const BitLengths& b, int which);
// 1-based index of the first violated inequality.
std::optional<int> FirstViolatedConstraint(const BitLengths& b);
// Throws kConstraintViolation naming the inequality and its values.
void CheckConstraints(const BitLengths& b);

// k2 = 310 is inside the feasible window 303..312 for k1 = 800 with
// 128-bit masks and blinds and 22-bit coordinates.
inline constexpr BitLengths kDefaultBitLengths{800, 310, 128, 128, 22};
inline constexpr BitLengths kToyBitLengths{256, 96, 32, 32, 10};

struct FineGrainParams {
  BitLengths bits;
  mpz_class p;
  mpz_class alpha;
};

// Validates the bit lengths, then draws primes p and alpha of exactly k1
// and k2 bits. Deterministic for a deterministic RandomSource.
FineGrainParams GenParams(const BitLengths& bits, RandomSource& rng);

// Re-checks constraints, primality, bit lengths and alpha^2 < p. Throws
// kConstraintViolation.
void ValidateParams(const FineGrainParams& params);

}  // namespace coavoid::finematch
