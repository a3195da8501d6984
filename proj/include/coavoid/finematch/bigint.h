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

#include "coavoid/bytes.h"
#include "coavoid/crypto.h"

namespace coavoid::finematch {

// Uniform in [0, 2^bits).
mpz_class RandomBits(RandomSource& rng, int bits);
// Uniform among bits-bit integers (top bit set).
mpz_class RandomExactBits(RandomSource& rng, int bits);
// Uniform in [0, bound). bound must be positive.
mpz_class RandomBelow(RandomSource& rng, const mpz_class& bound);
// A probable prime with exactly bits bits.
mpz_class RandomPrime(RandomSource& rng, int bits);

bool IsProbablePrime(const mpz_class& n);
int BitLength(const mpz_class& n);

// Minimal big-endian magnitude; zero encodes as an empty string.
Bytes ToBytes(const mpz_class& n);
// Left-padded to width; throws kCryptoFailure if n does not fit.
Bytes ToBytes(const mpz_class& n, size_t width);
mpz_class FromBytes(ByteSpan bytes);

}  // namespace coavoid::finematch
