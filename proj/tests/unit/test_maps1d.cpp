#include "cubiclab/maps1d.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cubiclab;
using namespace cubiclab::maps1d;

TEST(NMap, BranchValues) {
  EXPECT_EQ(NMap::eval(Rational(1, 2)), Rational(3, 2));
  EXPECT_EQ(NMap::eval(Rational(-3, 2)), Rational(3, 2));
  EXPECT_EQ(NMap::eval(Rational(1)), Rational(0));
  EXPECT_EQ(NMap::branch_of(Rational(1, 2)), NBranch::middle);
  EXPECT_EQ(NMap::branch_of(Rational(-1, 2)), NBranch::middle);
  EXPECT_EQ(NMap::branch_of(Rational(-3, 4)), NBranch::left);
  EXPECT_THROW(NMap::eval(Rational(2)), std::domain_error);
}

TEST(NMap, AgreesWithBranchFormulasOnRandomRationals) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> num(-1500, 1500);
  for (int i = 0; i < 2000; ++i) {
    const Rational x(num(rng), 1000);
    EXPECT_EQ(NMap::eval(x), oracle::nmap(x));
    EXPECT_NEAR(NMap::eval(to_double(x)), to_double(oracle::nmap(x)), 1e-14);
  }
}

TEST(NMap, ExactPeriodSixPoint) {
  using B = NBranch;
  const std::vector<B> it{B::middle, B::right, B::left, B::right, B::left, B::middle};
  const Rational q0 = exact_periodic_point(it);
  EXPECT_EQ(q0, Rational(45, 91));
  Rational x = q0;
  for (int k = 0; k < 6; ++k) x = oracle::nmap(x);
  EXPECT_EQ(x, q0);
  // Every branch covers the whole domain, so each itinerary is realized.
  const std::vector<B> other{B::left, B::right};
  EXPECT_EQ(exact_periodic_point(other), Rational(-3, 2));
  EXPECT_THROW(exact_periodic_point({}), std::invalid_argument);
}

TEST(Cubic, ValuesAndDerivatives) {
  const CubicMap f{3.0, 0.0};
  EXPECT_DOUBLE_EQ(cubic_eval(f, 2.0, 0), -2.0);
  EXPECT_DOUBLE_EQ(cubic_eval(f, 0.0, 0), 0.0);
  EXPECT_NEAR(cubic_eval(f, std::sqrt(2.0), 0), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(cubic_eval(f, 1.0, 1), 0.0);
  EXPECT_DOUBLE_EQ(cubic_eval(f, 1.0, 2), -6.0);
  EXPECT_DOUBLE_EQ(cubic_eval(f, 1.0, 3), -6.0);
  EXPECT_THROW(cubic_eval(f, 1.0, 4), std::invalid_argument);

  const ExactCubicMap e{Rational(3), Rational(0)};
  EXPECT_EQ(e(Rational(2)), Rational(-2));
}

TEST(Cubic, CriticalPoints) {
  auto [lo, hi] = critical_points(CubicMap{3.0, 0.0});
  EXPECT_DOUBLE_EQ(lo, -1.0);
  EXPECT_DOUBLE_EQ(hi, 1.0);
  auto [lo2, hi2] = critical_points(CubicMap{27.0 / 4.0, 0.0});
  EXPECT_DOUBLE_EQ(lo2, -1.5);
  EXPECT_DOUBLE_EQ(hi2, 1.5);
  const CubicMap g{2.9588, 0.0};
  auto [lo3, hi3] = critical_points(g);
  EXPECT_NEAR(hi3, std::sqrt(2.9588 / 3), 1e-15);
  EXPECT_NEAR(cubic_eval(g, hi3, 1), 0.0, 1e-14);
  EXPECT_NEAR(cubic_eval(g, lo3, 1), 0.0, 1e-14);
  EXPECT_THROW(critical_points(CubicMap{0.0, 0.0}), std::domain_error);
}

TEST(Conjugacy, HandValues) {
  EXPECT_NEAR(conjugacy_defect(0.5), 0.0, 1e-15);
  EXPECT_NEAR(conjugacy_defect(0.0), 0.0, 1e-15);
  EXPECT_NEAR(conjugacy_defect(1.0), 0.0, 1e-14);
  EXPECT_NEAR(conjugacy_h(1.5), 2.0, 1e-15);
}

TEST(Conjugacy, GridDefect) {
  double sup = 0;
  for (int i = 0; i < 10000; ++i) sup = std::max(sup, conjugacy_defect(-1.5 + 3.0 * i / 9999.0));
  EXPECT_LT(sup, 1e-12);
}

TEST(Conjugacy, DerivativeMatchesFiniteDifference) {
  for (double x = -1.4; x < 1.4; x += 0.1) {
    const double fd = (conjugacy_h(x + 1e-6) - conjugacy_h(x - 1e-6)) / 2e-6;
    EXPECT_NEAR(conjugacy_h_derivative(x), fd, 1e-8);
  }
}

TEST(Schwarzian, ClosedFormValues) {
  // mu = 2, y = 1/2: first, second, third derivatives 5/4, -3, -6, so S = -24/5 - 216/25.
  EXPECT_NEAR(schwarzian_closed_form(2.0, 0.5), -13.44, 1e-12);
  EXPECT_NEAR(schwarzian_closed_form(3.0, 0.0), -2.0, 1e-15);
  EXPECT_NEAR(schwarzian_closed_form(3.0, 2.0), -2.0, 1e-15);
  const CubicMap f{3.0, 0.0};
  EXPECT_NEAR(schwarzian(f, 0.0), -2.0, 1e-15);
  EXPECT_THROW(schwarzian(f, 1.0), std::domain_error);
}

TEST(Schwarzian, NegativeEverywhereProperty) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> mu(0.01, 10), y(-5, 5);
  for (int i = 0; i < 5000; ++i) {
    const double m = mu(rng), t = y(rng);
    const CubicMap f{m, 0.0};
    if (std::abs(-3 * t * t + m) < 1e-3) continue;
    EXPECT_LT(schwarzian_closed_form(m, t), 0.0);
    EXPECT_NEAR(schwarzian(f, t), schwarzian_closed_form(m, t), 1e-9 * std::abs(schwarzian_closed_form(m, t)));
  }
}

TEST(PeriodicSearch, FixedPointsOfCubic) {
  const auto res = find_periodic(as_map1d(CubicMap{3.0, 0.0}), 1, {-2.0, 2.0}, 1e-12);
  ASSERT_EQ(res.orbits.size(), 3u);
  EXPECT_NEAR(res.orbits[0].points[0], -std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(res.orbits[1].points[0], 0.0, 1e-12);
  EXPECT_NEAR(res.orbits[2].points[0], std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(res.orbits[1].multiplier, 3.0, 1e-10);
}

TEST(PeriodicSearch, PeriodTwoIncludesPlusMinusTwo) {
  const auto res = find_periodic(as_map1d(CubicMap{3.0, 0.0}), 2, {-2.0, 2.0}, 1e-10);
  bool found = false;
  for (const auto& o : res.orbits)
    if (o.period == 2 && std::abs(o.points[0] + 2.0) < 1e-9 && std::abs(o.points[1] - 2.0) < 1e-9) found = true;
  EXPECT_TRUE(found);
}

TEST(PeriodicSearch, PointCountMatchesSignChangeOracle) {
  // Points of minimal period p: sign changes of F^p(y) - y on a fine grid,
  // minus the points whose period divides p.
  const CubicMap f{2.9, 0.0};
  const auto map = as_map1d(f);
  std::map<int, int> fixed_points_of_power;
  for (int p = 1; p <= 4; ++p)
    fixed_points_of_power[p] =
        oracle::sign_changes([&](double y) { return iterate(f, y, p) - y; }, -2.05, 2.05, 2'000'000);
  for (int p = 1; p <= 4; ++p) {
    int minimal = fixed_points_of_power[p];
    for (int d = 1; d < p; ++d)
      if (p % d == 0) {
        const auto r = find_periodic(map, d, {-2.05, 2.05}, 1e-9);
        for (const auto& o : r.orbits) minimal -= static_cast<int>(o.points.size());
      }
    const auto res = find_periodic(map, p, {-2.05, 2.05}, 1e-9);
    int points = 0;
    for (const auto& o : res.orbits) points += static_cast<int>(o.points.size());
    EXPECT_EQ(points, minimal) << "period " << p;
  }
}

TEST(PeriodicSearch, NMapPeriodSixContainsQ0) {
  const auto res = find_periodic(nmap_as_map1d(), 6, {40.0 / 81.0, 0.5}, 1e-9);
  bool found = false;
  for (const auto& o : res.orbits)
    for (double x : o.points)
      if (std::abs(x - 45.0 / 91.0) < 1e-10) found = true;
  EXPECT_TRUE(found);
}

TEST(PeriodicSearch, RejectsBadArguments) {
  const auto map = as_map1d(CubicMap{3.0, 0.0});
  EXPECT_THROW(find_periodic(map, 0, {-2.0, 2.0}, 1e-10), std::invalid_argument);
  EXPECT_THROW(find_periodic(map, 1, {2.0, -2.0}, 1e-10), std::invalid_argument);
}

TEST(Schwarzian, ClosedFormMatchesDefinitionAtPinnedParameters) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> y(-2, 2);
  for (double m : {2.0, 2.9588, 3.0}) {
    const CubicMap f{m, 0.0};
    int used = 0;
    while (used < 1000) {
      const double t = y(rng);
      if (std::abs(-3 * t * t + m) < 0.1) continue;
      ++used;
      const double exact = schwarzian_closed_form(m, t);
      EXPECT_NEAR(schwarzian(f, t), exact, 1e-12 * std::max(1.0, std::abs(exact))) << "mu=" << m << " y=" << t;
    }
  }
}
