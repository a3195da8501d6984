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
#include <memory>
#include <string>
#include <string_view>

#include "coavoid/bytes.h"

namespace coavoid {

Digest32 Sha256(ByteSpan data);
Digest32 Sha256(std::initializer_list<ByteSpan> parts);

// Single-block AES-128 (ECB, no padding).
Key16 Aes128EncryptBlock(const Key16& key, const Key16& block);

// Reusable AES-128 block cipher bound to one key; avoids re-running the key
// schedule when one key encrypts many blocks.
class Aes128 {
 public:
  explicit Aes128(const Key16& key);
  ~Aes128();
  Aes128(Aes128&&) noexcept;
  Aes128& operator=(Aes128&&) noexcept;
  Aes128(const Aes128&) = delete;
  Aes128& operator=(const Aes128&) = delete;

  Key16 Encrypt(const Key16& block) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// AES-256-GCM. Seal returns ciphertext || 16-byte tag. Open throws
// kCryptoFailure on authentication failure.
Bytes AesGcmSeal(const Digest32& key, const std::array<uint8_t, 12>& nonce,
                 ByteSpan aad, ByteSpan plaintext);
Bytes AesGcmOpen(const Digest32& key, const std::array<uint8_t, 12>& nonce,
                 ByteSpan aad, ByteSpan sealed);

// Standard base64 with padding. Decode throws kParseError.
std::string Base64Encode(ByteSpan data);
Bytes Base64Decode(std::string_view text);

// Source of random bytes. Protocol code takes a RandomSource& so the
// simulator can replay runs from a seed while production uses the OS CSPRNG.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void Fill(std::span<uint8_t> out) = 0;

  uint64_t NextU64();
  template <size_t N>
  std::array<uint8_t, N> Array() {
    std::array<uint8_t, N> out{};
    Fill(out);
    return out;
  }
};

// OpenSSL RAND_bytes.
class SecureRandom final : public RandomSource {
 public:
  void Fill(std::span<uint8_t> out) override;
};

// AES-128-CTR keystream keyed by SHA-256(seed || label). A CSPRNG as long as
// the seed stays secret; fully reproducible from (seed, label).
class DeterministicRandom final : public RandomSource {
 public:
  DeterministicRandom(uint64_t seed, std::string_view label);

  void Fill(std::span<uint8_t> out) override;

 private:
  Aes128 cipher_;
  Key16 counter_{};
  Key16 buffer_{};
  size_t used_ = 16;
};

}  // namespace coavoid
