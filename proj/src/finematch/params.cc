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

#include "coavoid/finematch/params.h"

#include <algorithm>

#include <fmt/format.h>

#include "coavoid/error.h"
#include "coavoid/finematch/bigint.h"

namespace coavoid::finematch {

int ConstraintLhs(const BitLengths& b, int which) {
  const int beta = b.coord_bits;
  switch (which) {
    case 1:
      return b.k4 + std::max(2 * b.k2 + 2 * beta + 2, b.k2 + beta + b.k3 + 2);
    case 2:
      return b.k4 +
             std::max(2 * b.k2 + 2 * beta + 2, b.k2 + 2 * beta + 1 + b.k3);
    case 3:
      return b.k4 + b.k3 + 2 * beta + 2;
  }
  Throw(ErrorCode::kConstraintViolation, fmt::format("no inequality {}", which));
}

int ConstraintRhs(const BitLengths& b, int which) {
  return which == 3 ? b.k2 : b.k1;
}

std::optional<int> FirstViolatedConstraint(const BitLengths& b) {
  for (int i = 1; i <= 3; ++i) {
    if (!(ConstraintLhs(b, i) < ConstraintRhs(b, i))) return i;
  }
  return std::nullopt;
}

void CheckConstraints(const BitLengths& b) {
  COAVOID_ENFORCE(b.k1 > 0 && b.k2 > 1 && b.k3 > 0 && b.k4 > 1 &&
                      b.coord_bits > 0 && b.coord_bits <= 62,
                  ErrorCode::kConstraintViolation,
                  fmt::format("bit lengths out of range ({}, {}, {}, {}, {})",
                              b.k1, b.k2, b.k3, b.k4, b.coord_bits));
  if (auto bad = FirstViolatedConstraint(b)) {
    static constexpr const char* kText[] = {
        "", "k4 + max(2k2 + 2b + 2, k2 + b + k3 + 2) < k1",
        "k4 + max(2k2 + 2b + 2, k2 + 2b + 1 + k3) < k1",
        "k4 + k3 + 2b + 2 < k2"};
    Throw(ErrorCode::kConstraintViolation,
          fmt::format("inequality {} ({}) fails: {} is not < {}", *bad,
                      kText[*bad], ConstraintLhs(b, *bad),
                      ConstraintRhs(b, *bad)));
  }
}

FineGrainParams GenParams(const BitLengths& bits, RandomSource& rng) {
  CheckConstraints(bits);
  FineGrainParams params{bits, RandomPrime(rng, bits.k1),
                         RandomPrime(rng, bits.k2)};
  ValidateParams(params);
  return params;
}

void ValidateParams(const FineGrainParams& params) {
  CheckConstraints(params.bits);
  COAVOID_ENFORCE(BitLength(params.p) == params.bits.k1 &&
                      BitLength(params.alpha) == params.bits.k2,
                  ErrorCode::kConstraintViolation,
                  "p or alpha has the wrong bit length");
  COAVOID_ENFORCE(IsProbablePrime(params.p) && IsProbablePrime(params.alpha),
                  ErrorCode::kConstraintViolation, "p or alpha not prime");
  COAVOID_ENFORCE(params.alpha * params.alpha < params.p,
                  ErrorCode::kConstraintViolation, "alpha^2 >= p");
}

}  // namespace coavoid::finematch
