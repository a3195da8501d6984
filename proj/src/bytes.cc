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

#include "coavoid/bytes.h"

#include "coavoid/error.h"

namespace coavoid {

namespace {

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string ToHex(ByteSpan bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes FromHex(std::string_view hex) {
  COAVOID_ENFORCE(hex.size() % 2 == 0, ErrorCode::kParseError,
                  "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = HexValue(hex[2 * i]);
    int lo = HexValue(hex[2 * i + 1]);
    COAVOID_ENFORCE(hi >= 0 && lo >= 0, ErrorCode::kParseError,
                    "invalid hex digit");
    out[i] = static_cast<uint8_t>(hi << 4 | lo);
  }
  return out;
}

template <size_t N>
std::array<uint8_t, N> FixedFromHex(std::string_view hex) {
  COAVOID_ENFORCE(hex.size() == 2 * N, ErrorCode::kParseError,
                  "expected " + std::to_string(2 * N) + " hex digits, got " +
                      std::to_string(hex.size()));
  Bytes raw = FromHex(hex);
  std::array<uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

template std::array<uint8_t, 16> FixedFromHex<16>(std::string_view);
template std::array<uint8_t, 32> FixedFromHex<32>(std::string_view);

void AppendU16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void AppendU32(Bytes& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void AppendU64(Bytes& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void Append(Bytes& out, ByteSpan data) {
  out.insert(out.end(), data.begin(), data.end());
}

void AppendLengthPrefixed(Bytes& out, ByteSpan data) {
  AppendU32(out, static_cast<uint32_t>(data.size()));
  Append(out, data);
}

ByteSpan ByteReader::Take(size_t n) {
  COAVOID_ENFORCE(n <= remaining(), ErrorCode::kMalformedPayload,
                  "truncated input: need " + std::to_string(n) + " bytes, have " +
                      std::to_string(remaining()));
  ByteSpan s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}

uint8_t ByteReader::U8() { return Take(1)[0]; }

uint16_t ByteReader::U16() {
  auto s = Take(2);
  return static_cast<uint16_t>(s[0] << 8 | s[1]);
}

uint32_t ByteReader::U32() {
  uint32_t v = 0;
  for (uint8_t b : Take(4)) v = v << 8 | b;
  return v;
}

uint64_t ByteReader::U64() {
  uint64_t v = 0;
  for (uint8_t b : Take(8)) v = v << 8 | b;
  return v;
}

ByteSpan ByteReader::LengthPrefixed() { return Take(U32()); }

}  // namespace coavoid
