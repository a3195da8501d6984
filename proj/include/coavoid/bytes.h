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

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coavoid {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

using Key16 = std::array<uint8_t, 16>;
using Digest32 = std::array<uint8_t, 32>;

std::string ToHex(ByteSpan bytes);
Bytes FromHex(std::string_view hex);

// Parses exactly N bytes of hex; throws kParseError on length mismatch.
template <size_t N>
std::array<uint8_t, N> FixedFromHex(std::string_view hex);

inline ByteSpan AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

void AppendU16(Bytes& out, uint16_t v);
void AppendU32(Bytes& out, uint32_t v);
void AppendU64(Bytes& out, uint64_t v);
void Append(Bytes& out, ByteSpan data);
// 4-byte big-endian length followed by the bytes.
void AppendLengthPrefixed(Bytes& out, ByteSpan data);

// Sequential big-endian reader over a byte span. Every read throws
// kMalformedPayload when the input is exhausted.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  uint8_t U8();
  uint16_t U16();
  uint32_t U32();
  uint64_t U64();
  ByteSpan Take(size_t n);
  ByteSpan LengthPrefixed();
  template <size_t N>
  std::array<uint8_t, N> Fixed() {
    std::array<uint8_t, N> out{};
    auto s = Take(N);
    std::copy(s.begin(), s.end(), out.begin());
    return out;
  }

  bool done() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  ByteSpan data_;
  size_t pos_ = 0;
};

struct ArrayHash {
  template <size_t N>
  size_t operator()(const std::array<uint8_t, N>& a) const noexcept {
    // Inputs are hash outputs or cipher blocks, so the leading bytes are
    // already uniformly distributed.
    static_assert(N >= sizeof(size_t));
    size_t h;
    std::memcpy(&h, a.data(), sizeof(h));
    return h;
  }
};

}  // namespace coavoid
