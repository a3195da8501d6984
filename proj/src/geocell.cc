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

#include "coavoid/geocell.h"

#include <cmath>
#include <numbers>
#include <string>

#include "coavoid/crypto.h"
#include "coavoid/error.h"

namespace coavoid::geocell {

namespace {

constexpr double kEarthRadiusM = 6371008.8;
constexpr double kRes9EdgeM = 174.375668;
constexpr double kSqrt3 = std::numbers::sqrt3;

double Radians(double deg) { return deg * std::numbers::pi / 180.0; }
double Degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

double RotationOf(int resolution) {
  static const double kClassIII = -std::atan(kSqrt3 / 5.0);
  return resolution % 2 == 0 ? 0.0 : kClassIII;
}

PlanarPoint Rotate(PlanarPoint p, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// Nearest hexagon centre in axial coordinates (cube rounding).
std::pair<int64_t, int64_t> RoundAxial(double q, double r) {
  double s = -q - r;
  double rq = std::round(q), rr = std::round(r), rs = std::round(s);
  double dq = std::abs(rq - q), dr = std::abs(rr - r), ds = std::abs(rs - s);
  if (dq > dr && dq > ds) {
    rq = -rr - rs;
  } else if (dr > ds) {
    rr = -rq - rs;
  }
  return {static_cast<int64_t>(rq), static_cast<int64_t>(rr)};
}

constexpr std::array<std::pair<int, int>, 6> kAxialDirections{
    {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};

}  // namespace

CellIndex CellIndex::FromAxial(int resolution, int32_t q, int32_t r) {
  return {resolution, static_cast<uint64_t>(static_cast<uint32_t>(q)) << 32 |
                          static_cast<uint32_t>(r)};
}

double EdgeLengthMeters(int resolution) {
  ValidateResolution(resolution);
  return kRes9EdgeM * std::pow(std::sqrt(7.0), 9 - resolution);
}

void ValidateResolution(int resolution) {
  COAVOID_ENFORCE(resolution >= 0 && resolution <= kMaxResolution,
                  ErrorCode::kResolutionOutOfRange,
                  "resolution " + std::to_string(resolution) +
                      " outside [0, 15]");
}

void ValidatePoint(const GeoPoint& p) {
  COAVOID_ENFORCE(std::isfinite(p.lat) && std::isfinite(p.lon) &&
                      p.lat >= -90 && p.lat <= 90 && p.lon >= -180 &&
                      p.lon <= 180,
                  ErrorCode::kInvalidCoordinate,
                  "coordinate (" + std::to_string(p.lat) + ", " +
                      std::to_string(p.lon) + ") out of range");
}

LocalProjection::LocalProjection(RegionConfig region)
    : region_(region), cos_lat0_(std::cos(Radians(region.centroid.lat))) {
  ValidatePoint(region.centroid);
  COAVOID_ENFORCE(region.extent_deg > 0 && region.extent_deg <= 10,
                  ErrorCode::kConfigInvalid,
                  "region extent must be in (0, 10] degrees");
}

PlanarPoint LocalProjection::Project(const GeoPoint& p) const {
  return {kEarthRadiusM * Radians(p.lon - region_.centroid.lon) * cos_lat0_,
          kEarthRadiusM * Radians(p.lat - region_.centroid.lat)};
}

GeoPoint LocalProjection::Unproject(const PlanarPoint& p) const {
  return {region_.centroid.lat + Degrees(p.y / kEarthRadiusM),
          region_.centroid.lon + Degrees(p.x / (kEarthRadiusM * cos_lat0_))};
}

bool LocalProjection::Contains(const GeoPoint& p) const {
  double half = region_.extent_deg / 2;
  return std::abs(p.lat - region_.centroid.lat) <= half &&
         std::abs(p.lon - region_.centroid.lon) <= half;
}

PlanarHexIndexer::PlanarHexIndexer(RegionConfig region)
    : projection_(region) {}

CellIndex PlanarHexIndexer::Index(const GeoPoint& p, int resolution) const {
  ValidateResolution(resolution);
  ValidatePoint(p);
  COAVOID_ENFORCE(projection_.Contains(p), ErrorCode::kInvalidCoordinate,
                  "point outside the configured region");
  return IndexPlanar(projection_.Project(p), resolution);
}

CellIndex PlanarHexIndexer::IndexPlanar(const PlanarPoint& p,
                                        int resolution) const {
  ValidateResolution(resolution);
  double edge = EdgeLengthMeters(resolution);
  PlanarPoint local = Rotate(p, -RotationOf(resolution));
  double q = (kSqrt3 / 3.0 * local.x - local.y / 3.0) / edge;
  double r = (2.0 / 3.0 * local.y) / edge;
  auto [rq, rr] = RoundAxial(q, r);
  return CellIndex::FromAxial(resolution, static_cast<int32_t>(rq),
                              static_cast<int32_t>(rr));
}

PlanarPoint PlanarHexIndexer::CenterPlanar(const CellIndex& c) const {
  double edge = EdgeLengthMeters(c.resolution);
  PlanarPoint local{edge * kSqrt3 * (c.q() + c.r() / 2.0), edge * 1.5 * c.r()};
  return Rotate(local, RotationOf(c.resolution));
}

GeoPoint PlanarHexIndexer::Center(const CellIndex& c) const {
  return projection_.Unproject(CenterPlanar(c));
}

std::vector<CellIndex> PlanarHexIndexer::Neighbors(const CellIndex& c) const {
  std::vector<CellIndex> out;
  for (auto [dq, dr] : kAxialDirections) {
    CellIndex n = CellIndex::FromAxial(c.resolution, c.q() + dq, c.r() + dr);
    if (projection_.Contains(Center(n))) out.push_back(n);
  }
  return out;
}

CellIndex PlanarHexIndexer::Parent(const CellIndex& c) const {
  COAVOID_ENFORCE(c.resolution > 0, ErrorCode::kResolutionOutOfRange,
                  "resolution 0 has no parent");
  return IndexPlanar(CenterPlanar(c), c.resolution - 1);
}

std::array<uint8_t, 10> SerializeCell(const CellIndex& c) {
  ValidateResolution(c.resolution);
  std::array<uint8_t, 10> out{};
  out[0] = static_cast<uint8_t>(c.resolution);
  for (int i = 0; i < 8; ++i) {
    out[1 + i] = static_cast<uint8_t>(c.cell_id >> (56 - 8 * i));
  }
  out[9] = kDigestVersion;
  return out;
}

CellDigest DigestOf(const CellIndex& c) {
  auto bytes = SerializeCell(c);
  return {Sha256(bytes)};
}

CellDigest HideLocation(const CellIndexer& indexer, const GeoPoint& p,
                        int resolution) {
  return DigestOf(indexer.Index(p, resolution));
}

}  // namespace coavoid::geocell
