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

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

#include "coavoid/bytes.h"

// Location fuzzing: a GPS fix is snapped to a hexagonal cell at a chosen
// resolution and the cell index is hashed with SHA-256. Two devices obtain the
// same digest iff they stood in the same cell; the digest cannot be mapped
// back to a cell through this API.
namespace coavoid::geocell {

inline constexpr int kMaxResolution = 15;
inline constexpr int kDefaultResolution = 9;
inline constexpr uint8_t kDigestVersion = 0x01;

struct GeoPoint {
  double lat = 0;
  double lon = 0;
};

// Metres east (x) and north (y) of the region centroid.
struct PlanarPoint {
  double x = 0;
  double y = 0;
};

// cell_id packs the axial hexagon coordinates (q, r) as two 32-bit signed
// integers, q in the high word.
struct CellIndex {
  int resolution = 0;
  uint64_t cell_id = 0;

  static CellIndex FromAxial(int resolution, int32_t q, int32_t r);
  int32_t q() const { return static_cast<int32_t>(cell_id >> 32); }
  int32_t r() const { return static_cast<int32_t>(cell_id & 0xffffffffu); }

  auto operator<=>(const CellIndex&) const = default;
};

struct CellDigest {
  Digest32 digest{};

  auto operator<=>(const CellDigest&) const = default;
};

// Hexagon edge length (= circumradius) at a resolution. Successive
// resolutions shrink by sqrt(7); resolution 9 is 174.375668 m.
double EdgeLengthMeters(int resolution);

// Throws kResolutionOutOfRange / kInvalidCoordinate.
void ValidateResolution(int resolution);
void ValidatePoint(const GeoPoint& p);

struct RegionConfig {
  GeoPoint centroid{34.3416, 108.9398};
  double extent_deg = 1.0;
};

// Equirectangular projection around the region centroid.
class LocalProjection {
 public:
  explicit LocalProjection(RegionConfig region);

  PlanarPoint Project(const GeoPoint& p) const;
  GeoPoint Unproject(const PlanarPoint& p) const;
  bool Contains(const GeoPoint& p) const;
  const RegionConfig& region() const { return region_; }

 private:
  RegionConfig region_;
  double cos_lat0_;
};

// Maps points to cells. PlanarHexIndexer is the built-in implementation; an
// H3-backed indexer can be dropped in behind the same interface.
class CellIndexer {
 public:
  virtual ~CellIndexer() = default;

  virtual CellIndex Index(const GeoPoint& p, int resolution) const = 0;
  // Adjacent cells, excluding c. Fewer than six at the region edge.
  virtual std::vector<CellIndex> Neighbors(const CellIndex& c) const = 0;
  virtual GeoPoint Center(const CellIndex& c) const = 0;
};

// Flat hexagonal tiling over the local projection. Pointy-top hexagons; odd
// resolutions are rotated by -atan(sqrt(3)/5) so that every resolution's
// centre lattice contains the next coarser one (aperture 7).
class PlanarHexIndexer final : public CellIndexer {
 public:
  explicit PlanarHexIndexer(RegionConfig region = {});

  CellIndex Index(const GeoPoint& p, int resolution) const override;
  std::vector<CellIndex> Neighbors(const CellIndex& c) const override;
  GeoPoint Center(const CellIndex& c) const override;

  CellIndex IndexPlanar(const PlanarPoint& p, int resolution) const;
  PlanarPoint CenterPlanar(const CellIndex& c) const;
  // The cell at resolution - 1 containing this cell's centre.
  CellIndex Parent(const CellIndex& c) const;

  const LocalProjection& projection() const { return projection_; }

 private:
  LocalProjection projection_;
};

// res (1 byte) || cell_id (8 bytes big-endian) || version 0x01.
std::array<uint8_t, 10> SerializeCell(const CellIndex& c);

CellDigest DigestOf(const CellIndex& c);

CellDigest HideLocation(const CellIndexer& indexer, const GeoPoint& p,
                        int resolution);

}  // namespace coavoid::geocell
