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

#include "coavoid/finematch/bigint.h"

#include "coavoid/error.h"

namespace coavoid::finematch {

mpz_class RandomBits(RandomSource& rng, int bits) {
  if (bits <= 0) return 0;
  Bytes buf((static_cast<size_t>(bits) + 7) / 8);
  rng.Fill(buf);
  int excess = static_cast<int>(buf.size() * 8) - bits;
  buf[0] &= static_cast<uint8_t>(0xff >> excess);
  return FromBytes(buf);
}

mpz_class RandomExactBits(RandomSource& rng, int bits) {
  COAVOID_ENFORCE(bits >= 1, ErrorCode::kConstraintViolation, "bit length < 1");
  mpz_class n = RandomBits(rng, bits);
  mpz_setbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 1));
  return n;
}

mpz_class RandomBelow(RandomSource& rng, const mpz_class& bound) {
  COAVOID_ENFORCE(bound > 0, ErrorCode::kConstraintViolation,
                  "empty sampling range");
  int bits = BitLength(bound);
  while (true) {
    mpz_class n = RandomBits(rng, bits);
    if (n < bound) return n;
  }
}

mpz_class RandomPrime(RandomSource& rng, int bits) {
  COAVOID_ENFORCE(bits >= 2, ErrorCode::kConstraintViolation,
                  "prime of fewer than 2 bits");
  while (true) {
    mpz_class n = RandomExactBits(rng, bits);
    if (bits > 2) mpz_setbit(n.get_mpz_t(), 0);
    if (IsProbablePrime(n)) return n;
  }
}

bool IsProbablePrime(const mpz_class& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

int BitLength(const mpz_class& n) {
  if (n == 0) return 0;
  return static_cast<int>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

Bytes ToBytes(const mpz_class& n) {
  COAVOID_ENFORCE(n >= 0, ErrorCode::kCryptoFailure, "negative integer");
  if (n == 0) return {};
  Bytes out((mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8);
  size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, n.get_mpz_t());
  out.resize(written);
  return out;
}

Bytes ToBytes(const mpz_class& n, size_t width) {
  Bytes minimal = ToBytes(n);
  COAVOID_ENFORCE(minimal.size() <= width, ErrorCode::kCryptoFailure,
                  "integer wider than " + std::to_string(width) + " bytes");
  Bytes out(width - minimal.size(), 0);
  out.insert(out.end(), minimal.begin(), minimal.end());
  return out;
}

mpz_class FromBytes(ByteSpan bytes) {
  mpz_class n;
  if (!bytes.empty()) {
    mpz_import(n.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return n;
}

}  // namespace coavoid::finematch
