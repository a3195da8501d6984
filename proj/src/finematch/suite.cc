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

#include "coavoid/finematch/suite.h"

#include <openssl/evp.h>

#include "coavoid/error.h"
#include "coavoid/finematch/bigint.h"
#include "coavoid/finematch/typea.h"

namespace coavoid::finematch {

namespace {

class BlsTypeASuite final : public CryptoSuite {
 public:
  BlsTypeASuite() : group_(typea::Group::Default()) {}

  std::string_view name() const override { return "bls-typea"; }

  KeyPair GenerateSigningKey(RandomSource& rng) const override {
    mpz_class sk = 1 + RandomBelow(rng, group_.r() - 1);
    return {ToBytes(sk, ScalarBytes()),
            group_.Serialize(group_.Mul(group_.generator(), sk))};
  }

  Bytes Sign(ByteSpan secret_key, ByteSpan message) const override {
    return group_.Serialize(
        group_.Mul(group_.HashToGroup(message), Scalar(secret_key)));
  }

  bool Verify(ByteSpan public_key, ByteSpan message,
              ByteSpan signature) const override {
    try {
      typea::Point pk = group_.Parse(public_key);
      typea::Point sig = group_.Parse(signature);
      return group_.Pair(group_.generator(), sig) ==
             group_.Pair(pk, group_.HashToGroup(message));
    } catch (const Error&) {
      return false;
    }
  }

  KeyPair GenerateAgreementKey(RandomSource& rng) const override {
    return GenerateSigningKey(rng);
  }

  Digest32 Agree(ByteSpan secret_key, ByteSpan peer_public) const override {
    typea::Point shared = group_.Mul(group_.Parse(peer_public), Scalar(secret_key));
    return Sha256({AsBytes("coavoid-typea-dh"), group_.Serialize(shared)});
  }

 private:
  size_t ScalarBytes() const {
    return (static_cast<size_t>(BitLength(group_.r())) + 7) / 8;
  }

  mpz_class Scalar(ByteSpan secret_key) const {
    mpz_class sk = FromBytes(secret_key);
    COAVOID_ENFORCE(sk > 0 && sk < group_.r(), ErrorCode::kCryptoFailure,
                    "secret key out of range");
    return sk;
  }

  const typea::Group& group_;
};

struct PkeyDeleter {
  void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};

Pkey PrivateKey(int type, ByteSpan raw) {
  Pkey key(EVP_PKEY_new_raw_private_key(type, nullptr, raw.data(), raw.size()));
  COAVOID_ENFORCE(key != nullptr, ErrorCode::kCryptoFailure, "bad private key");
  return key;
}

Pkey PublicKey(int type, ByteSpan raw) {
  return Pkey(EVP_PKEY_new_raw_public_key(type, nullptr, raw.data(), raw.size()));
}

KeyPair RawKeyPair(int type, RandomSource& rng) {
  auto seed = rng.Array<32>();
  Pkey key = PrivateKey(type, seed);
  Bytes pub(32);
  size_t len = pub.size();
  COAVOID_ENFORCE(EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &len) == 1,
                  ErrorCode::kCryptoFailure, "public key export");
  pub.resize(len);
  return {Bytes(seed.begin(), seed.end()), pub};
}

class Ed25519Suite final : public CryptoSuite {
 public:
  std::string_view name() const override { return "ed25519"; }

  KeyPair GenerateSigningKey(RandomSource& rng) const override {
    return RawKeyPair(EVP_PKEY_ED25519, rng);
  }

  Bytes Sign(ByteSpan secret_key, ByteSpan message) const override {
    Pkey key = PrivateKey(EVP_PKEY_ED25519, secret_key);
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    Bytes sig(64);
    size_t len = sig.size();
    bool ok = ctx &&
              EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) == 1 &&
              EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                             message.size()) == 1;
    COAVOID_ENFORCE(ok, ErrorCode::kCryptoFailure, "Ed25519 sign");
    sig.resize(len);
    return sig;
  }

  bool Verify(ByteSpan public_key, ByteSpan message,
              ByteSpan signature) const override {
    Pkey key = PublicKey(EVP_PKEY_ED25519, public_key);
    if (!key) return false;
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    return ctx &&
           EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) == 1 &&
           EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                            message.data(), message.size()) == 1;
  }

  KeyPair GenerateAgreementKey(RandomSource& rng) const override {
    return RawKeyPair(EVP_PKEY_X25519, rng);
  }

  Digest32 Agree(ByteSpan secret_key, ByteSpan peer_public) const override {
    Pkey own = PrivateKey(EVP_PKEY_X25519, secret_key);
    Pkey peer = PublicKey(EVP_PKEY_X25519, peer_public);
    COAVOID_ENFORCE(peer != nullptr, ErrorCode::kCryptoFailure, "bad peer key");
    std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> ctx(
        EVP_PKEY_CTX_new(own.get(), nullptr));
    Bytes shared(32);
    size_t len = shared.size();
    bool ok = ctx && EVP_PKEY_derive_init(ctx.get()) == 1 &&
              EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) == 1 &&
              EVP_PKEY_derive(ctx.get(), shared.data(), &len) == 1;
    COAVOID_ENFORCE(ok, ErrorCode::kCryptoFailure, "X25519 derive");
    shared.resize(len);
    return Sha256({AsBytes("coavoid-x25519"), shared});
  }
};

}  // namespace

std::unique_ptr<CryptoSuite> MakeSuite(std::string_view name) {
  if (name == "bls-typea") return std::make_unique<BlsTypeASuite>();
  if (name == "ed25519") return std::make_unique<Ed25519Suite>();
  Throw(ErrorCode::kConfigInvalid, "unknown crypto suite '" + std::string(name) + "'");
}

}  // namespace coavoid::finematch
