#include "cubiclab/manifold.hpp"
#include "cubiclab/renorm.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

using namespace cubiclab;
using namespace cubiclab::manifold;

namespace {

planar::PlanarMap henon28() { return planar::cubic_henon_family()({2.8, 0.1}); }

planar::SaddlePoint origin_saddle(const planar::PlanarMap& m) {
  auto s = planar::find_saddle(m, 1, {0, 0});
  return *s.point;
}

// Uniform-grid bucket index for nearest-sample queries.
class PointIndex {
 public:
  PointIndex(const std::vector<Vec2>& pts, double cell) : pts_(pts), cell_(cell) {
    for (std::size_t i = 0; i < pts.size(); ++i) buckets_[key(cell_of(pts[i].x), cell_of(pts[i].y))].push_back(i);
  }

  double nearest(const Vec2& p, int reach = 1) const {
    double best = std::numeric_limits<double>::infinity();
    const long cx = cell_of(p.x), cy = cell_of(p.y);
    for (long dx = -reach; dx <= reach; ++dx)
      for (long dy = -reach; dy <= reach; ++dy) {
        auto it = buckets_.find(key(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (auto i : it->second) best = std::min(best, distance(pts_[i], p));
      }
    return best;
  }

 private:
  long cell_of(double v) const { return static_cast<long>(std::floor(v / cell_)); }
  static long long key(long x, long y) { return (static_cast<long long>(x) << 32) ^ (y & 0xffffffffLL); }
  const std::vector<Vec2>& pts_;
  double cell_;
  std::unordered_map<long long, std::vector<std::size_t>> buckets_;
};

}  // namespace

TEST(Manifold, LinearUnstableBranchIsTheYAxis) {
  const auto m = planar::linear_family()({0.2, 2.0});
  const auto s = origin_saddle(m);
  for (int side : {1, -1}) {
    const auto c = grow_manifold(m, s, Kind::unstable, 3.0, side);
    EXPECT_GE(c.length(), 3.0);
    for (const auto& p : c.points) EXPECT_EQ(p.x, 0.0);
    EXPECT_EQ(std::signbit(c.points.back().y), side < 0);
  }
  const auto st = grow_manifold(m, s, Kind::stable, 2.0, 1);
  for (const auto& p : st.points) EXPECT_EQ(p.y, 0.0);
}

TEST(Manifold, RejectsNonSaddle) {
  const auto m = planar::cubic_henon_family()({0.5, 0.1});
  const auto s = planar::classify_point(m, {0, 0}, 1);
  EXPECT_THROW(grow_manifold(m, s, Kind::unstable, 1.0), std::invalid_argument);
}

TEST(Manifold, InvarianceOfHenonUnstableBranch) {
  const auto m = henon28();
  const auto s = origin_saddle(m);
  GrowthControls fine{1e-6, 1e-3, 0.005, 2'000'000, 1e-7};
  const auto c = grow_manifold(m, s, Kind::unstable, 4.0, 1, fine);
  EXPECT_FALSE(c.truncated);
  EXPECT_LT(invariance_defect(m, c, 7), 1e-6);
}

TEST(Manifold, InvarianceOfHenonStableBranch) {
  const auto m = henon28();
  const auto s = origin_saddle(m);
  GrowthControls fine{1e-6, 1e-3, 0.005, 2'000'000, 1e-7};
  const auto c = grow_manifold(m, s, Kind::stable, 2.0, 1, fine);
  EXPECT_LT(invariance_defect(m, c, 7), 1e-6);
}

TEST(Manifold, UnstableBranchOfOriginLiesOnTheAttractor) {
  const auto m = henon28();
  const auto s = origin_saddle(m);
  const Box2 trap{-3, 3, -3, 3};
  const auto orbit = planar::iterate(m, {0.1, 0.9}, 1'001'000, 1e3);
  ASSERT_FALSE(orbit.escaped);
  const std::vector<Vec2> sample(orbit.points.begin() + 1000, orbit.points.end());
  const PointIndex index(sample, 0.02);
  double worst = 0;
  for (int side : {1, -1}) {
    const auto c = grow_manifold(m, s, Kind::unstable, 6.0, side, {},
                                 [&](const Vec2& p) { return !trap.contains(p); });
    EXPECT_FALSE(c.stopped) << "branch left the trapping box";
    for (const auto& p : c.points) {
      ASSERT_TRUE(trap.contains(p));
      worst = std::max(worst, index.nearest(p));
    }
  }
  EXPECT_LT(worst, 0.02);
}

TEST(Manifold, RenormalizedUnstableBranchReachesOtherSaddle) {
  const renorm::RenormalizedMap psi(renorm::ModelParams{}, 8, 3, 0);
  const auto m = psi.as_planar();
  const auto plus = planar::find_saddle(m, 2, {-2, 2});
  const auto minus = planar::find_saddle(m, 2, {2, -2});
  ASSERT_TRUE(plus.point && minus.point);
  double best = 1e9;
  for (int side : {1, -1}) {
    const auto c = grow_manifold(m, *plus.point, Kind::unstable, 20.0, side, {1e-5, 2e-3, 0.05, 2'000'000, 1e-6},
                                 [](const Vec2& p) { return std::abs(p.x) > 2.05 || std::abs(p.y) > 2.5; });
    best = std::min(best, distance_to_polyline(c.points, minus.point->location));
  }
  EXPECT_LT(best, 0.05);
}

TEST(Manifold, PolylineHelpers) {
  const std::vector<Vec2> line{{0, 0}, {1, 0}, {1, 1}};
  EXPECT_DOUBLE_EQ(distance_to_polyline(line, {0.5, 0.3}), 0.3);
  EXPECT_DOUBLE_EQ(distance_to_polyline(line, {2, 0.5}), 1.0);
  std::stringstream ss;
  write_polyline_csv(ss, line);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x,y");
}
