#include "cubiclab/planar.hpp"
#include "cubiclab/renorm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cubiclab;
using namespace cubiclab::planar;

namespace {

PlanarMap henon(double a, double b = 0.1) { return cubic_henon_family()({a, b}); }

}  // namespace

TEST(Geometry, EigenOfDiagonalAndRotation) {
  const auto e = eigen(Mat2{0.2, 0, 0, 2});
  ASSERT_TRUE(e.real);
  EXPECT_DOUBLE_EQ(e.values[0].real(), 2.0);
  EXPECT_DOUBLE_EQ(e.values[1].real(), 0.2);
  const auto r = eigen(Mat2{0, -1, 1, 0});
  EXPECT_FALSE(r.real);
  EXPECT_NEAR(std::abs(r.values[0]), 1.0, 1e-15);
  const Mat2 m{1, 2, 3, 4};
  const Mat2 id = m * m.inverse();
  EXPECT_NEAR(id.a, 1, 1e-15);
  EXPECT_NEAR(id.b, 0, 1e-15);
  EXPECT_NEAR(id.d, 1, 1e-15);
}

TEST(Iterate, LinearMap) {
  const auto m = linear_family()({0.2, 2.0});
  const auto o = iterate(m, {1, 0}, 3);
  ASSERT_EQ(o.points.size(), 3u);
  EXPECT_DOUBLE_EQ(o.points[0].x, 0.2);
  EXPECT_DOUBLE_EQ(o.points[1].x, 0.04000000000000001);
  EXPECT_NEAR(o.points[2].x, 0.008, 1e-17);
  EXPECT_EQ(o.points[2].y, 0.0);
}

TEST(Iterate, LimitEndomorphismPeriodTwo) {
  const auto m = limit_endomorphism_family()({3.0, 0.0});
  const auto o = iterate(m, {2, -2}, 6);
  for (std::size_t i = 0; i < o.points.size(); ++i) {
    const double s = (i % 2 == 0) ? -1 : 1;
    EXPECT_DOUBLE_EQ(o.points[i].x, 2 * s);
    EXPECT_DOUBLE_EQ(o.points[i].y, -2 * s);
  }
}

TEST(Iterate, AttractorOrbitStaysInTrappingBox) {
  const auto o = iterate(henon(2.8), {0.1, 0.9}, 100000);
  EXPECT_FALSE(o.escaped);
  const Box2 box{-3, 3, -3, 3};
  for (const auto& p : o.points) ASSERT_TRUE(box.contains(p));
}

TEST(Iterate, EscapeIsReported) {
  const auto o = iterate(henon(2.8), {0, 5}, 100, 1e3);
  EXPECT_TRUE(o.escaped);
  EXPECT_LT(o.steps_completed, 100);
}

TEST(Henon, InverseRoundTripProperty) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto m = henon(2.8);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p{u(rng), u(rng)};
    EXPECT_LT(distance(m.inverse(m(p)), p), 1e-10);
  }
}

TEST(Henon, JacobianAndDeterminant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto m = henon(2.8);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{u(rng), u(rng)};
    EXPECT_DOUBLE_EQ(m.jacobian_at(p).det(), -0.1);
    EXPECT_LT((m.jacobian_at(p) - m.finite_difference_jacobian(p)).max_abs(), 1e-6);
  }
}

TEST(Henon, PowerJacobianChainRule) {
  const auto m = henon(2.8);
  const Vec2 p{0.05, 0.6};
  const Mat2 j2 = m.power_jacobian(p, 2);
  const Mat2 expected = m.jacobian_at(m(p)) * m.jacobian_at(p);
  EXPECT_LT((j2 - expected).max_abs(), 1e-14);
  EXPECT_LT(distance(m.power(p, 2), m(m(p))), 1e-15);
}

TEST(Saddles, OriginOfHenon) {
  const auto s = find_saddle(henon(2.8), 1, {0, 0});
  ASSERT_TRUE(s.converged);
  ASSERT_TRUE(s.point.has_value());
  EXPECT_TRUE(s.point->is_saddle());
  // lambda^2 - 2.8 lambda - 0.1
  const double d = std::sqrt(2.8 * 2.8 + 0.4);
  EXPECT_NEAR(s.point->eigenvalues[0], (2.8 + d) / 2, 1e-12);
  EXPECT_NEAR(s.point->eigenvalues[1], (2.8 - d) / 2, 1e-12);
  EXPECT_NEAR(s.point->eigenvalues[0], 2.83527, 1e-5);
  EXPECT_NEAR(s.point->eigenvalues[1], -0.03527, 1e-5);
}

TEST(Saddles, OuterFixedPoint) {
  const auto s = find_saddle(henon(2.8), 1, {0.14, 1.38});
  ASSERT_TRUE(s.point.has_value());
  EXPECT_NEAR(s.point->location.x, 0.1 * std::sqrt(1.9), 1e-12);
  EXPECT_NEAR(s.point->location.y, std::sqrt(1.9), 1e-12);
  EXPECT_TRUE(s.point->is_saddle());
  const double d = std::sqrt(2.9 * 2.9 + 0.4);
  EXPECT_NEAR(s.point->eigenvalues[0], (-2.9 - d) / 2, 1e-12);
  EXPECT_NEAR(s.point->eigenvalues[1], (-2.9 + d) / 2, 1e-12);
}

TEST(Saddles, ExactlyThreeFixedPoints) {
  const auto fps = find_periodic_points(henon(2.8), 1, {-3, 3, -3, 3}, 50);
  ASSERT_EQ(fps.size(), 3u);
  for (const auto& s : fps) {
    EXPECT_TRUE(s.is_saddle());
    // y (y^2 - (a + b - 1)) = 0 with x = b y
    const double y = s.location.y;
    EXPECT_NEAR(y * (y * y - 1.9), 0.0, 1e-12);
    EXPECT_NEAR(s.location.x, 0.1 * y, 1e-12);
  }
}

TEST(Saddles, RenormalizedPeriodTwoNearLimit) {
  double prev = 1e9;
  for (int n : {4, 6, 8}) {
    const renorm::RenormalizedMap psi(renorm::ModelParams{}, n, 3, 0);
    const auto s = find_saddle(psi.as_planar(), 2, {-2, 2});
    ASSERT_TRUE(s.point.has_value()) << "n=" << n;
    const double d = distance(s.point->location, {-2, 2});
    EXPECT_LT(d, 0.05) << "n=" << n;
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(Saddles, DivergenceIsReported) {
  const auto m = linear_family()({0.2, 2.0});
  PlanarMap shifted = m;
  shifted.forward = [](const Vec2& p) { return Vec2{p.x + 1, p.y}; };
  shifted.jacobian = [](const Vec2&) { return Mat2{1, 0, 0, 1}; };
  const auto s = find_saddle(shifted, 1, {0, 0});
  EXPECT_FALSE(s.converged);
  EXPECT_FALSE(s.diagnostic.empty());
}

TEST(Lyapunov, LinearMapIsLogSigma) {
  const auto m = linear_family()({0.2, 2.0});
  const auto e = lyapunov(m, {0, 0}, 10000, 100);
  EXPECT_NEAR(e.exponent, std::log(2.0), 1e-9);
}

TEST(Lyapunov, ChaoticAtA28) {
  const auto m = henon(2.8);
  std::vector<double> ex;
  for (Vec2 s : {Vec2{0.1, 0.9}, Vec2{0.0, 0.5}, Vec2{-0.2, -1.1}, Vec2{0.05, 1.2}, Vec2{-0.05, -0.3}}) {
    const auto e = lyapunov(m, s, 1000000, 1000);
    ASSERT_TRUE(e.bounded);
    EXPECT_GT(e.exponent, 0.0);
    EXPECT_LT(e.drift, 0.02);
    ex.push_back(e.exponent);
  }
  const auto [lo, hi] = std::minmax_element(ex.begin(), ex.end());
  EXPECT_LT(*hi - *lo, 0.02);
}

TEST(Lyapunov, SinkAtA05) {
  // The orbit converges to the origin, a sink with eigenvalues of
  // lambda^2 - 0.5 lambda - 0.1.
  const auto e = lyapunov(henon(0.5), {0.1, 0.9}, 100000, 1000);
  ASSERT_TRUE(e.bounded);
  EXPECT_LT(e.exponent, 0.0);
  EXPECT_NEAR(e.exponent, std::log((0.5 + std::sqrt(0.65)) / 2), 1e-3);
}

TEST(Lyapunov, RejectsShortRuns) {
  EXPECT_THROW(lyapunov(henon(2.8), {0, 0}, 100, 0), std::invalid_argument);
}
