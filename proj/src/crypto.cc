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

#include "coavoid/crypto.h"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include "coavoid/error.h"

namespace coavoid {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx NewCipherCtx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  COAVOID_ENFORCE(ctx != nullptr, ErrorCode::kCryptoFailure,
                  "EVP_CIPHER_CTX_new");
  return ctx;
}

}  // namespace

Digest32 Sha256(ByteSpan data) {
  Digest32 out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest32 Sha256(std::initializer_list<ByteSpan> parts) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  bool ok = ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1;
  for (ByteSpan p : parts) {
    ok = ok && EVP_DigestUpdate(ctx.get(), p.data(), p.size()) == 1;
  }
  Digest32 out{};
  unsigned int len = 0;
  ok = ok && EVP_DigestFinal_ex(ctx.get(), out.data(), &len) == 1;
  COAVOID_ENFORCE(ok && len == 32, ErrorCode::kCryptoFailure, "SHA-256");
  return out;
}

struct Aes128::Impl {
  CipherCtx ctx;
};

Aes128::Aes128(const Key16& key) : impl_(std::make_unique<Impl>()) {
  impl_->ctx = NewCipherCtx();
  COAVOID_ENFORCE(EVP_EncryptInit_ex(impl_->ctx.get(), EVP_aes_128_ecb(),
                                     nullptr, key.data(), nullptr) == 1,
                  ErrorCode::kCryptoFailure, "AES-128 key setup");
  EVP_CIPHER_CTX_set_padding(impl_->ctx.get(), 0);
}

Aes128::~Aes128() = default;
Aes128::Aes128(Aes128&&) noexcept = default;
Aes128& Aes128::operator=(Aes128&&) noexcept = default;

Key16 Aes128::Encrypt(const Key16& block) const {
  Key16 out{};
  int len = 0;
  COAVOID_ENFORCE(EVP_EncryptUpdate(impl_->ctx.get(), out.data(), &len,
                                    block.data(), 16) == 1 &&
                      len == 16,
                  ErrorCode::kCryptoFailure, "AES-128 block encrypt");
  return out;
}

Key16 Aes128EncryptBlock(const Key16& key, const Key16& block) {
  return Aes128(key).Encrypt(block);
}

Bytes AesGcmSeal(const Digest32& key, const std::array<uint8_t, 12>& nonce,
                 ByteSpan aad, ByteSpan plaintext) {
  CipherCtx ctx = NewCipherCtx();
  int len = 0;
  Bytes out(plaintext.size() + 16);
  bool ok =
      EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce.data()) == 1 &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) == 1 &&
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) == 1 &&
      EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &len) == 1 &&
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, 16,
                          out.data() + plaintext.size()) == 1;
  COAVOID_ENFORCE(ok, ErrorCode::kCryptoFailure, "AES-GCM seal");
  return out;
}

Bytes AesGcmOpen(const Digest32& key, const std::array<uint8_t, 12>& nonce,
                 ByteSpan aad, ByteSpan sealed) {
  COAVOID_ENFORCE(sealed.size() >= 16, ErrorCode::kCryptoFailure,
                  "AES-GCM input shorter than tag");
  size_t body = sealed.size() - 16;
  CipherCtx ctx = NewCipherCtx();
  int len = 0;
  Bytes out(body);
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end());
  bool ok =
      EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce.data()) == 1 &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) == 1 &&
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(),
                        static_cast<int>(body)) == 1 &&
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, 16, tag.data()) ==
          1 &&
      EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &len) == 1;
  COAVOID_ENFORCE(ok, ErrorCode::kCryptoFailure,
                  "AES-GCM authentication failed");
  return out;
}

std::string Base64Encode(ByteSpan data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          data.data(), static_cast<int>(data.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

Bytes Base64Decode(std::string_view text) {
  COAVOID_ENFORCE(text.size() % 4 == 0, ErrorCode::kParseError,
                  "base64 length not a multiple of 4");
  Bytes out(text.size() / 4 * 3);
  int n = EVP_DecodeBlock(out.data(),
                          reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  COAVOID_ENFORCE(n >= 0, ErrorCode::kParseError, "invalid base64");
  // EVP_DecodeBlock counts padding as zero bytes.
  size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<size_t>(n) - pad);
  return out;
}

uint64_t RandomSource::NextU64() {
  std::array<uint8_t, 8> b{};
  Fill(b);
  uint64_t v = 0;
  for (uint8_t x : b) v = v << 8 | x;
  return v;
}

void SecureRandom::Fill(std::span<uint8_t> out) {
  COAVOID_ENFORCE(RAND_bytes(out.data(), static_cast<int>(out.size())) == 1,
                  ErrorCode::kCryptoFailure, "RAND_bytes");
}

namespace {

Key16 SeedKey(uint64_t seed, std::string_view label) {
  Bytes material;
  AppendU64(material, seed);
  Append(material, AsBytes(label));
  Digest32 d = Sha256(material);
  Key16 k{};
  std::copy_n(d.begin(), 16, k.begin());
  return k;
}

}  // namespace

DeterministicRandom::DeterministicRandom(uint64_t seed, std::string_view label)
    : cipher_(SeedKey(seed, label)) {}

void DeterministicRandom::Fill(std::span<uint8_t> out) {
  for (uint8_t& b : out) {
    if (used_ == 16) {
      buffer_ = cipher_.Encrypt(counter_);
      for (int i = 15; i >= 0 && ++counter_[i] == 0; --i) {
      }
      used_ = 0;
    }
    b = buffer_[used_++];
  }
}

}  // namespace coavoid
