#include "cubiclab/tangency.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace cubiclab;
using namespace cubiclab::tangency;

namespace {

std::vector<Vec2> graph(const std::function<double(double)>& f, double lo, double hi, int n) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    pts.push_back({x, f(x)});
  }
  return pts;
}

Probe linear_depth(double offset, double slope) {
  return [=](double t) -> std::optional<GapEvent> {
    GapEvent e;
    e.depth = offset + slope * t;
    e.min_gap = -e.depth;
    e.location = {t, 0};
    return e;
  };
}

}  // namespace

TEST(Detect, ParabolaTouchingLine) {
  // Dense sampling keeps the polyline interpolation error out of the
  // second difference across fibers.
  const auto u = graph([](double x) { return x * x; }, -1, 1, 100000);
  const auto s = graph([](double) { return 0.0; }, -1, 1, 10);
  const auto d = detect_tangencies(u, s, {-0.9, 0.9, -0.5, 1.5});
  ASSERT_FALSE(d.rejected) << d.diagnostic;
  ASSERT_EQ(d.events.size(), 1u);
  EXPECT_NEAR(d.events[0].location.x, 0.0, 1e-6);
  EXPECT_NEAR(d.events[0].location.y, 0.0, 1e-6);
  EXPECT_NEAR(d.events[0].min_gap, 0.0, 1e-6);
  EXPECT_EQ(d.events[0].extremum, Extremum::local_min);
  EXPECT_NEAR(d.events[0].curvature_unstable, 2.0, 2e-3);
}

TEST(Detect, SeparatedParabola) {
  const auto u = graph([](double x) { return x * x + 0.1; }, -1, 1, 2000);
  const auto s = graph([](double) { return 0.0; }, -1, 1, 10);
  const auto d = detect_tangencies(u, s, {-0.9, 0.9, -0.5, 1.5});
  ASSERT_EQ(d.events.size(), 1u);
  EXPECT_NEAR(d.events[0].min_gap, 0.1, 1e-6);
  EXPECT_LT(d.events[0].depth, 0.0);
  EXPECT_EQ(d.crossings, 0);
}

TEST(Detect, RejectsFoldedCurve) {
  // A curve meeting a vertical fiber twice inside the window.
  std::vector<Vec2> folded;
  for (int i = 0; i <= 200; ++i) {
    const double t = -1 + 2.0 * i / 200;
    folded.push_back({t * t - 0.5, t});
  }
  const auto s = graph([](double) { return -2.0; }, -1, 1, 10);
  const auto d = detect_tangencies(folded, s, {-0.6, 0.6, -1.5, 1.5});
  EXPECT_TRUE(d.rejected);
  EXPECT_FALSE(d.diagnostic.empty());
}

TEST(Classify, MakingBreakingTransverseWithheld) {
  const auto making = classify_tangency(linear_depth(0, 0.9), 0, 1e-3);
  EXPECT_EQ(making.classification, Classification::contact_making);
  EXPECT_NEAR(making.gap_slope, 0.9, 1e-9);
  EXPECT_TRUE(making.richardson_consistent);

  const auto breaking = classify_tangency(linear_depth(0, -0.5), 0, 1e-3);
  EXPECT_EQ(breaking.classification, Classification::contact_breaking);
  EXPECT_NEAR(breaking.gap_slope, -0.5, 1e-9);

  const auto transverse = classify_tangency(linear_depth(0.3, 0.9), 0, 1e-3);
  EXPECT_EQ(transverse.classification, Classification::transverse);

  const auto flat = classify_tangency(linear_depth(0, 1e-6), 0, 1e-3);
  EXPECT_EQ(flat.classification, Classification::withheld);
}

TEST(Classify, LostEventIsWithheld) {
  const Probe lost = [](double) -> std::optional<GapEvent> { return std::nullopt; };
  const auto e = classify_tangency(lost, 0, 1e-3);
  EXPECT_EQ(e.classification, Classification::withheld);
  EXPECT_FALSE(e.note.empty());
}

TEST(Velocity, Table) {
  const auto v = velocity_derivatives();
  ASSERT_TRUE(v.ok) << v.diagnostic;
  EXPECT_NEAR(v.y_plus, 2.0, 1e-12);
  EXPECT_NEAR(v.y_minus, -2.0, 1e-12);
  EXPECT_NEAR(v.dy_plus_dmu, 0.25, 1e-3);
  EXPECT_NEAR(v.dy_minus_dmu, -0.25, 1e-3);
  EXPECT_NEAR(v.dy_plus_dnu, 0.10, 1e-3);
  EXPECT_NEAR(v.dy_minus_dnu, 0.10, 1e-3);
  EXPECT_NEAR(v.dFc_plus_dmu, 1.0, 1e-6);
  EXPECT_NEAR(v.dFc_minus_dmu, -1.0, 1e-6);
  EXPECT_NEAR(v.dFc_plus_dnu, 1.0, 1e-9);
  EXPECT_NEAR(v.dFc_minus_dnu, 1.0, 1e-9);
}

TEST(Velocity, RejectsNonPositiveMu) {
  EXPECT_FALSE(velocity_derivatives(-1.0, 0.0).ok);
}

class Experiment : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { ex_ = new TangencyExperiment(ExperimentConfig{}); }
  static void TearDownTestSuite() {
    delete ex_;
    ex_ = nullptr;
  }
  static TangencyExperiment* ex_;
};

TangencyExperiment* Experiment::ex_ = nullptr;

TEST_F(Experiment, CouplingAndResidual) {
  EXPECT_NEAR(ex_->coupling(), std::pow(0.4, 6), 1e-15);
  EXPECT_NEAR(ex_->measured_residual(), 2 * std::pow(0.4, 6), 1e-9);
}

TEST_F(Experiment, SaddlesNearLimitPoints) {
  const auto pair = ex_->saddles(3, 0);
  EXPECT_LT(distance(pair.plus.location, {-2, 2}), 0.05);
  EXPECT_LT(distance(pair.minus.location, {2, -2}), 0.05);
  EXPECT_TRUE(pair.plus.is_saddle());
}

TEST_F(Experiment, DepthCrossesZeroAsNuIncreases) {
  const auto below = ex_->upper(3, -0.05);
  const auto above = ex_->upper(3, 0.05);
  ASSERT_TRUE(below && above);
  EXPECT_LT(below->depth, 0.0);
  EXPECT_GT(above->depth, 0.0);
}

TEST_F(Experiment, ScanFindsMakingAndBreakingEvents) {
  const auto r = scan(*ex_, 3, 0, -0.1, 0.1, 9);
  int upper = 0, lower = 0;
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const auto& e = r.events[i];
    if (r.region[i] == "upper") {
      ++upper;
      EXPECT_EQ(e.classification, Classification::contact_making);
      EXPECT_NEAR(e.gap_slope, 0.9, 0.1 + ex_->measured_residual());
      EXPECT_NEAR(e.location.x, 1.0, 0.05);
      EXPECT_NEAR(e.location.y, 2.0, 0.05);
    } else {
      ++lower;
      EXPECT_EQ(e.classification, Classification::contact_breaking);
      EXPECT_LT(e.gap_slope, 0.0);
      EXPECT_NEAR(e.location.x, -1.0, 0.05);
    }
  }
  EXPECT_EQ(upper, 1);
  EXPECT_EQ(lower, 1);
  std::stringstream ss;
  write_events_csv(ss, r);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "t,region,x,y,min_gap,gap_slope,classification");
}

TEST_F(Experiment, ScanIsThreadIndependent) {
  const auto a = scan(*ex_, 3, 0, -0.02, 0.0, 3, 1);
  const auto b = scan(*ex_, 3, 0, -0.02, 0.0, 3, 3);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) EXPECT_EQ(a.events[i].parameter, b.events[i].parameter);
}

TEST_F(Experiment, LocusSlopeAndFrozenDiagnostic) {
  std::vector<double> grid;
  for (int i = -3; i <= 3; ++i) grid.push_back(3 + 0.02 * i);
  const auto f = f_bar_slope(*ex_, grid, -0.1, 0.1);
  EXPECT_TRUE(f.skipped.empty());
  EXPECT_NEAR(f.slope, -5.0 / 6.0, 0.1);
  EXPECT_TRUE(f.strictly_decreasing);

  // With the unstable curve held fixed only the stable-side velocities move
  // the locus: -(1/4)/(1/10).
  const auto frozen = f_bar_slope(*ex_, grid, -0.3, 0.3, 1, std::make_pair(3.0, f.nu_bar[3]));
  EXPECT_NEAR(frozen.slope, -2.5, 0.05);
}
