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

#include "coavoid/finematch/typea.h"

#include "coavoid/crypto.h"
#include "coavoid/error.h"
#include "coavoid/finematch/bigint.h"

namespace coavoid::finematch::typea {

namespace {

constexpr std::string_view kQ =
    "8f36b6813c5f68368df69a62fe57d244627b6f25d6408d8ddcd470d801381d78"
    "873b77a153cec7712bf314ba5dbcec555c046959c784e28b6d073c41f45e769b";
constexpr std::string_view kR = "a687b356477a69ee38428e00044fbb75a7ac19bd";
constexpr std::string_view kH =
    "dc281d7d967b447a9827c99177c0f8dd2acf13d939a9853533ca1c57df418172"
    "cc6b343241fe7a4423cf04cc";

mpz_class Hex(std::string_view s) { return mpz_class(std::string(s), 16); }

}  // namespace

const Group& Group::Default() {
  static const Group group(Hex(kQ), Hex(kR), Hex(kH));
  return group;
}

Group::Group(mpz_class q, mpz_class r, mpz_class h)
    : q_(std::move(q)), r_(std::move(r)), h_(std::move(h)) {
  COAVOID_ENFORCE(q_ % 4 == 3 && h_ * r_ == q_ + 1, ErrorCode::kCryptoFailure,
                  "inconsistent pairing parameters");
  coord_bytes_ = (static_cast<size_t>(BitLength(q_)) + 7) / 8;
  g_ = HashToGroup(AsBytes("coavoid typea generator"));
}

mpz_class Group::Mod(const mpz_class& v) const {
  mpz_class out;
  mpz_mod(out.get_mpz_t(), v.get_mpz_t(), q_.get_mpz_t());
  return out;
}

mpz_class Group::Inverse(const mpz_class& v) const {
  mpz_class out;
  COAVOID_ENFORCE(mpz_invert(out.get_mpz_t(), v.get_mpz_t(), q_.get_mpz_t()) != 0,
                  ErrorCode::kCryptoFailure, "non-invertible field element");
  return out;
}

bool Group::OnCurve(const Point& p) const {
  if (p.infinity) return true;
  if (p.x < 0 || p.x >= q_ || p.y < 0 || p.y >= q_) return false;
  return Mod(p.y * p.y) == Mod(p.x * p.x * p.x + p.x);
}

bool Group::InSubgroup(const Point& p) const {
  return OnCurve(p) && Mul(p, r_).infinity;
}

Point Group::Negate(const Point& p) const {
  if (p.infinity) return p;
  return {p.x, Mod(-p.y), false};
}

Point Group::Add(const Point& a, const Point& b) const {
  if (a.infinity) return b;
  if (b.infinity) return a;
  mpz_class lambda;
  if (a.x == b.x) {
    if (Mod(a.y + b.y) == 0) return {};
    lambda = Mod((3 * a.x * a.x + 1) * Inverse(2 * a.y));
  } else {
    lambda = Mod((b.y - a.y) * Inverse(b.x - a.x));
  }
  mpz_class x = Mod(lambda * lambda - a.x - b.x);
  mpz_class y = Mod(lambda * (a.x - x) - a.y);
  return {x, y, false};
}

Point Group::Mul(const Point& p, const mpz_class& k) const {
  mpz_class e = k;
  Point base = p;
  if (e < 0) {
    e = -e;
    base = Negate(base);
  }
  Point acc;
  for (int i = BitLength(e) - 1; i >= 0; --i) {
    acc = Add(acc, acc);
    if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      acc = Add(acc, base);
    }
  }
  return acc;
}

Point Group::HashToGroup(ByteSpan message) const {
  const mpz_class sqrt_exp = (q_ + 1) / 4;
  for (uint32_t counter = 0;; ++counter) {
    Bytes ctr;
    AppendU32(ctr, counter);
    Digest32 d0 = Sha256({AsBytes("coavoid-h2g-0"), message, ctr});
    Digest32 d1 = Sha256({AsBytes("coavoid-h2g-1"), message, ctr});
    Bytes wide(d0.begin(), d0.end());
    wide.insert(wide.end(), d1.begin(), d1.end());
    mpz_class x = Mod(FromBytes(wide));
    mpz_class rhs = Mod(x * x * x + x);
    mpz_class y;
    mpz_powm(y.get_mpz_t(), rhs.get_mpz_t(), sqrt_exp.get_mpz_t(),
             q_.get_mpz_t());
    if (Mod(y * y) != rhs) continue;
    if ((d1[31] & 1) != mpz_tstbit(y.get_mpz_t(), 0)) y = Mod(-y);
    Point p = Mul(Point{x, y, false}, h_);
    if (!p.infinity) return p;
  }
}

Fq2 Group::Fq2Mul(const Fq2& x, const Fq2& y) const {
  // (a + bi)(c + di) = (ac - bd) + (ad + bc) i
  return {Mod(x.a * y.a - x.b * y.b), Mod(x.a * y.b + x.b * y.a)};
}

Fq2 Group::Fq2Pow(const Fq2& x, const mpz_class& e) const {
  Fq2 acc = Fq2One();
  for (int i = BitLength(e) - 1; i >= 0; --i) {
    acc = Fq2Mul(acc, acc);
    if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      acc = Fq2Mul(acc, x);
    }
  }
  return acc;
}

// f_{r,P} evaluated at psi(Q) = (-xQ, i yQ). Vertical lines take values in
// F_q and vanish under the final exponentiation, so only the tangent and
// chord lines are accumulated.
Fq2 Group::Miller(const Point& p, const Point& q) const {
  auto line = [&](const Point& t, const mpz_class& lambda) {
    // yQ' - yT - lambda (xQ' - xT) with xQ' = -xQ, yQ' = i yQ.
    return Fq2{Mod(lambda * (q.x + t.x) - t.y), q.y};
  };
  Fq2 f = Fq2One();
  Point t = p;
  for (int i = BitLength(r_) - 2; i >= 0; --i) {
    mpz_class lambda = Mod((3 * t.x * t.x + 1) * Inverse(2 * t.y));
    f = Fq2Mul(Fq2Mul(f, f), line(t, lambda));
    t = Add(t, t);
    if (mpz_tstbit(r_.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      if (t.x == p.x) {
        // t = -p on the last step: the chord is vertical.
        t = Add(t, p);
        continue;
      }
      lambda = Mod((p.y - t.y) * Inverse(p.x - t.x));
      f = Fq2Mul(f, line(t, lambda));
      t = Add(t, p);
    }
  }
  return f;
}

Fq2 Group::Pair(const Point& p, const Point& q) const {
  if (p.infinity || q.infinity) return Fq2One();
  Fq2 f = Miller(p, q);
  // f^(q-1) = conj(f) / f, then ^h.
  mpz_class norm = Mod(f.a * f.a + f.b * f.b);
  mpz_class inv = Inverse(norm);
  Fq2 f_inv{Mod(f.a * inv), Mod(-f.b * inv)};
  Fq2 conj{f.a, Mod(-f.b)};
  return Fq2Pow(Fq2Mul(conj, f_inv), h_);
}

Bytes Group::Serialize(const Point& p) const {
  COAVOID_ENFORCE(!p.infinity, ErrorCode::kCryptoFailure,
                  "cannot serialize the identity");
  Bytes out = ToBytes(p.x, coord_bytes_);
  Bytes y = ToBytes(p.y, coord_bytes_);
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

Point Group::Parse(ByteSpan bytes) const {
  COAVOID_ENFORCE(bytes.size() == 2 * coord_bytes_, ErrorCode::kCryptoFailure,
                  "bad point length");
  Point p{FromBytes(bytes.first(coord_bytes_)),
          FromBytes(bytes.subspan(coord_bytes_)), false};
  COAVOID_ENFORCE(InSubgroup(p), ErrorCode::kCryptoFailure,
                  "point not in the pairing group");
  return p;
}

}  // namespace coavoid::finematch::typea
