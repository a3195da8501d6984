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

#include <string_view>

#include "coavoid/bytes.h"

// Symmetric pairing on E: y^2 = x^3 + x over F_q, q = 3 mod 4. E is
// supersingular with q + 1 points; G is its subgroup of prime order r and
// q + 1 = h r. The pairing is the reduced Tate pairing composed with the
// distortion map (x, y) -> (-x, i y), landing in the order-r subgroup of
// F_q^2* with i^2 = -1.
namespace coavoid::finematch::typea {

struct Fq2 {
  mpz_class a;  // a + b i
  mpz_class b;

  bool operator==(const Fq2&) const = default;
};

struct Point {
  mpz_class x;
  mpz_class y;
  bool infinity = true;

  bool operator==(const Point&) const = default;
};

class Group {
 public:
  // The built-in 512-bit q, 160-bit r parameter set.
  static const Group& Default();

  Group(mpz_class q, mpz_class r, mpz_class h);

  const mpz_class& q() const { return q_; }
  const mpz_class& r() const { return r_; }
  const mpz_class& h() const { return h_; }
  const Point& generator() const { return g_; }

  bool OnCurve(const Point& p) const;
  bool InSubgroup(const Point& p) const;
  Point Add(const Point& a, const Point& b) const;
  Point Negate(const Point& p) const;
  Point Mul(const Point& p, const mpz_class& k) const;

  // Try-and-increment onto the curve, then cleared by the cofactor.
  Point HashToGroup(ByteSpan message) const;

  Fq2 Pair(const Point& p, const Point& q) const;

  Fq2 Fq2Mul(const Fq2& x, const Fq2& y) const;
  Fq2 Fq2Pow(const Fq2& x, const mpz_class& e) const;
  Fq2 Fq2One() const { return {1, 0}; }

  // x || y, each 64 bytes big-endian. Parse throws kCryptoFailure for a
  // point off the curve or outside G.
  Bytes Serialize(const Point& p) const;
  Point Parse(ByteSpan bytes) const;
  size_t coordinate_bytes() const { return coord_bytes_; }

 private:
  mpz_class Mod(const mpz_class& v) const;
  mpz_class Inverse(const mpz_class& v) const;
  Fq2 Miller(const Point& p, const Point& q) const;

  mpz_class q_, r_, h_;
  Point g_;
  size_t coord_bytes_;
};

}  // namespace coavoid::finematch::typea
