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

#include <memory>
#include <string_view>

#include "coavoid/crypto.h"

namespace coavoid::finematch {

struct KeyPair {
  Bytes secret_key;
  Bytes public_key;
};

// Signatures for announcements plus ephemeral key agreement for the relay
// channel. Sign/Verify are treated as opaque by the protocol code.
class CryptoSuite {
 public:
  virtual ~CryptoSuite() = default;

  virtual std::string_view name() const = 0;

  virtual KeyPair GenerateSigningKey(RandomSource& rng) const = 0;
  virtual Bytes Sign(ByteSpan secret_key, ByteSpan message) const = 0;
  // False for malformed keys or signatures.
  virtual bool Verify(ByteSpan public_key, ByteSpan message,
                      ByteSpan signature) const = 0;

  virtual KeyPair GenerateAgreementKey(RandomSource& rng) const = 0;
  // Shared secret hashed to 32 bytes. Throws kCryptoFailure on a bad peer
  // key.
  virtual Digest32 Agree(ByteSpan secret_key, ByteSpan peer_public) const = 0;
};

// "bls-typea": BLS signatures and Diffie-Hellman on a supersingular curve
// with a Tate pairing. "ed25519": Ed25519 signatures with X25519 agreement.
// Throws kConfigInvalid for other names.
std::unique_ptr<CryptoSuite> MakeSuite(std::string_view name);

}  // namespace coavoid::finematch
