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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "coavoid/error.h"

namespace coavoid::geocell {
namespace {

// Brute-force reference: the hexagon containing a point is the Voronoi cell
// of the nearest lattice centre. Centres are generated directly from the two
// lattice basis vectors, independent of the axial rounding in the indexer.
struct OracleHit {
  int64_t q, r;
  double nearest, second;
};

OracleHit NearestCentre(PlanarPoint p, int res) {
  double edge = EdgeLengthMeters(res);
  double phi = res % 2 == 0 ? 0.0 : -std::atan(std::sqrt(3.0) / 5.0);
  double len = edge * std::sqrt(3.0);
  double a1x = len * std::cos(phi), a1y = len * std::sin(phi);
  double a2x = len * std::cos(phi + M_PI / 3), a2y = len * std::sin(phi + M_PI / 3);
  // Solve p = u a1 + v a2 for real (u, v), then scan a window.
  double det = a1x * a2y - a2x * a1y;
  double u = (p.x * a2y - a2x * p.y) / det;
  double v = (a1x * p.y - p.x * a1y) / det;
  OracleHit best{0, 0, 1e300, 1e300};
  for (int64_t i = std::llround(u) - 3; i <= std::llround(u) + 3; ++i) {
    for (int64_t j = std::llround(v) - 3; j <= std::llround(v) + 3; ++j) {
      double cx = i * a1x + j * a2x, cy = i * a1y + j * a2y;
      double d = std::hypot(p.x - cx, p.y - cy);
      if (d < best.nearest) {
        best.second = best.nearest;
        best = {i, j, d, best.second};
      } else if (d < best.second) {
        best.second = d;
      }
    }
  }
  return best;
}

RegionConfig Xian() { return {}; }

PlanarPoint RandomPlanar(std::mt19937_64& gen, const PlanarHexIndexer& idx) {
  // Stay a little inside the 1 deg x 1 deg region.
  std::uniform_real_distribution<double> lat(-0.45, 0.45), lon(-0.45, 0.45);
  GeoPoint c = idx.projection().region().centroid;
  return idx.projection().Project({c.lat + lat(gen), c.lon + lon(gen)});
}

TEST(EdgeLengthTest, MatchesPublishedLadder) {
  // Average hexagon edge lengths (km) published for H3.
  const double kPublished[] = {1107.712591, 418.6760055, 158.2446558,
                               59.81085794, 22.6063794,  8.544408276,
                               3.229482772, 1.220629759, 0.461354684,
                               0.174375668, 0.065907807, 0.024910561,
                               0.009415526, 0.003559893, 0.001348575,
                               0.000509713};
  for (int r = 0; r <= kMaxResolution; ++r) {
    EXPECT_NEAR(EdgeLengthMeters(r) / (kPublished[r] * 1000), 1.0, 0.005)
        << "res " << r;
  }
}

TEST(CellIndexTest, AgreesWithNearestCentreOracle) {
  PlanarHexIndexer idx(Xian());
  std::mt19937_64 gen(1);
  for (int res = 0; res <= kMaxResolution; ++res) {
    for (int i = 0; i < 500; ++i) {
      PlanarPoint p = RandomPlanar(gen, idx);
      OracleHit hit = NearestCentre(p, res);
      if (hit.second - hit.nearest < 1e-6 * EdgeLengthMeters(res)) continue;
      PlanarPoint c = idx.CenterPlanar(idx.IndexPlanar(p, res));
      EXPECT_NEAR(std::hypot(p.x - c.x, p.y - c.y), hit.nearest,
                  1e-6 * EdgeLengthMeters(res))
          << "res " << res;
    }
  }
}

TEST(CellIndexTest, DeterministicAndPacksAxial) {
  PlanarHexIndexer idx(Xian());
  GeoPoint p{34.2610, 108.9420};
  EXPECT_EQ(idx.Index(p, 9), idx.Index(p, 9));
  auto c = CellIndex::FromAxial(9, -5, 7);
  EXPECT_EQ(c.q(), -5);
  EXPECT_EQ(c.r(), 7);
}

TEST(CellIndexTest, NearbyPointsWellInsideShareCell) {
  PlanarHexIndexer idx(Xian());
  std::mt19937_64 gen(2);
  int checked = 0;
  while (checked < 200) {
    PlanarPoint p = RandomPlanar(gen, idx);
    PlanarPoint q{p.x + 1.0, p.y};
    OracleHit hp = NearestCentre(p, 9), hq = NearestCentre(q, 9);
    // Both points at least 2 m from any cell boundary (the bisector between
    // nearest and second-nearest centre is half their distance gap away).
    if ((hp.second - hp.nearest) / 2 < 2 || (hq.second - hq.nearest) / 2 < 2) {
      continue;
    }
    EXPECT_EQ(idx.IndexPlanar(p, 9), idx.IndexPlanar(q, 9));
    ++checked;
  }
}

TEST(CellIndexTest, Errors) {
  PlanarHexIndexer idx(Xian());
  GeoPoint p{34.3, 108.9};
  auto code_of = [&](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kParseError;
  };
  EXPECT_EQ(code_of([&] { idx.Index(p, 16); }),
            ErrorCode::kResolutionOutOfRange);
  EXPECT_EQ(code_of([&] { idx.Index(p, -1); }),
            ErrorCode::kResolutionOutOfRange);
  EXPECT_EQ(code_of([&] { idx.Index({91, 108.9}, 9); }),
            ErrorCode::kInvalidCoordinate);
  EXPECT_EQ(code_of([&] { idx.Index({NAN, 108.9}, 9); }),
            ErrorCode::kInvalidCoordinate);
  EXPECT_EQ(code_of([&] { idx.Index({34.3, 120.0}, 9); }),
            ErrorCode::kInvalidCoordinate);
  EXPECT_EQ(code_of([&] { HideLocation(idx, p, 16); }),
            ErrorCode::kResolutionOutOfRange);
}

TEST(HideLocationTest, DigestLayoutGolden) {
  auto c = CellIndex::FromAxial(9, 3, -2);
  EXPECT_EQ(ToHex(SerializeCell(c)), "0900000003fffffffe01");
  // hashlib.sha256(bytes.fromhex("0900000003fffffffe01"))
  EXPECT_EQ(ToHex(DigestOf(c).digest),
            "ae380a7f0745a980de667aa05c21c7941f3edc34f3e21106529dddc561562eae");
}

TEST(HideLocationTest, DeterministicAndSeparatesAdjacentCells) {
  PlanarHexIndexer idx(Xian());
  GeoPoint p{34.2610, 108.9420};
  auto d = HideLocation(idx, p, 9);
  EXPECT_EQ(d, HideLocation(idx, p, 9));
  EXPECT_EQ(d.digest.size(), 32u);
  CellIndex c = idx.Index(p, 9);
  for (const CellIndex& n : idx.Neighbors(c)) {
    // Guaranteed-adjacent centres map back to their own cells.
    EXPECT_EQ(idx.Index(idx.Center(n), 9), n);
    EXPECT_NE(HideLocation(idx, idx.Center(n), 9), d);
  }
}

TEST(NeighborsTest, InteriorHasSixSymmetric) {
  PlanarHexIndexer idx(Xian());
  CellIndex c = idx.Index({34.30, 108.95}, 9);
  auto ns = idx.Neighbors(c);
  ASSERT_EQ(ns.size(), 6u);
  for (const CellIndex& n : ns) {
    EXPECT_NE(n, c);
    auto back = idx.Neighbors(n);
    EXPECT_NE(std::find(back.begin(), back.end(), c), back.end());
    PlanarPoint a = idx.CenterPlanar(c), b = idx.CenterPlanar(n);
    EXPECT_NEAR(std::hypot(a.x - b.x, a.y - b.y),
                std::sqrt(3.0) * EdgeLengthMeters(9), 1e-6);
  }
}

TEST(NeighborsTest, RegionEdgeHasFewer) {
  PlanarHexIndexer idx(Xian());
  GeoPoint corner{34.3416 + 0.4999, 108.9398 + 0.4999};
  CellIndex c = idx.Index(corner, 9);
  EXPECT_LT(idx.Neighbors(c).size(), 6u);
}

TEST(GeocellProperty, PartitionDiameterBound) {
  PlanarHexIndexer idx(Xian());
  std::mt19937_64 gen(3);
  std::vector<PlanarPoint> pts(10000);
  for (auto& p : pts) p = RandomPlanar(gen, idx);
  for (int res = 6; res <= 11; ++res) {
    std::map<CellIndex, std::vector<PlanarPoint>> cells;
    for (const auto& p : pts) cells[idx.IndexPlanar(p, res)].push_back(p);
    double bound = 2 * EdgeLengthMeters(res) * (1 + 1e-9);
    double worst = 0;
    for (const auto& [cell, members] : cells) {
      for (size_t i = 0; i < members.size(); ++i) {
        for (size_t j = i + 1; j < members.size(); ++j) {
          worst = std::max(worst, std::hypot(members[i].x - members[j].x,
                                             members[i].y - members[j].y));
        }
      }
    }
    EXPECT_LE(worst, bound) << "res " << res;
  }
}

TEST(GeocellProperty, ResolutionRefinement) {
  PlanarHexIndexer idx(Xian());
  std::mt19937_64 gen(4);
  const int kPoints = 10000;
  for (int res = 6; res <= 11; ++res) {
    int nested = 0;
    for (int i = 0; i < kPoints; ++i) {
      PlanarPoint p = RandomPlanar(gen, idx);
      CellIndex parent = idx.IndexPlanar(p, res);
      CellIndex child = idx.IndexPlanar(p, res + 1);
      CellIndex via_center = idx.Parent(child);
      if (via_center == parent) {
        ++nested;
      } else {
        auto ns = idx.Neighbors(parent);
        EXPECT_NE(std::find(ns.begin(), ns.end(), via_center), ns.end());
      }
      // The parent's centre is exactly a child-lattice centre.
      PlanarPoint pc = idx.CenterPlanar(parent);
      PlanarPoint cc = idx.CenterPlanar(idx.IndexPlanar(pc, res + 1));
      EXPECT_NEAR(std::hypot(pc.x - cc.x, pc.y - cc.y), 0.0, 1e-6);
    }
    // Aperture-7 hexagons are not perfectly nested: about 7.2% of a parent's
    // area belongs to children centred in a neighbouring parent.
    double rate = static_cast<double>(nested) / kPoints;
    EXPECT_GE(rate, 0.92) << "res " << res;
    EXPECT_LE(rate, 0.94) << "res " << res;
  }
}

}  // namespace
}  // namespace coavoid::geocell
