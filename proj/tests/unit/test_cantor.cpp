#include "cubiclab/cantor.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace cubiclab;
using namespace cubiclab::cantor;

namespace {

ExactCantor two_intervals() {
  ExactCantor k;
  k.ambient = {0, 3};
  k.intervals = {{0, 1}, {2, 3}};
  k.generation = 1;
  return k;
}

MarkovBranchSystem thirds_system() {
  return {{0, 1}, {{{0, Rational(1, 3)}, {3, 0}}, {{Rational(2, 3), 1}, {3, -2}}}};
}

}  // namespace

// Values frozen from an exact-rational oracle run of the construction
// (forward orbit of the branch chain and quadratic-time thickness scan).
TEST(Km, FirstGenerationOrbit) {
  const auto km = construct_km(6, 1);
  EXPECT_EQ(km.q0, Rational(45, 91));
  ASSERT_EQ(km.orbit.size(), 6u);
  const std::vector<Rational> expected{Rational(45, 91),  Rational(135, 91), Rational(-132, 91),
                                       Rational(123, 91), Rational(-96, 91), Rational(15, 91)};
  EXPECT_EQ(km.orbit, expected);
  EXPECT_EQ(oracle::nmap(km.orbit.back()), km.q0);
  for (std::size_t i = 0; i + 1 < km.orbit.size(); ++i) EXPECT_EQ(oracle::nmap(km.orbit[i]), km.orbit[i + 1]);
  EXPECT_EQ(km.x_m, Rational(40, 81));
  EXPECT_GT(km.q0, km.x_m);
  EXPECT_LT(km.q0, Rational(1, 2));
}

TEST(Km, QZeroForLargerM) {
  EXPECT_EQ(construct_km(8, 1).q0, Rational(819, 1640));
  EXPECT_EQ(construct_km(10, 1).q0, Rational(3690, 7381));
}

TEST(Km, IntervalCountsAndThickness) {
  const auto km = construct_km(6, 5);
  const std::vector<std::size_t> counts{6, 17, 50, 148, 437};
  const std::vector<Rational> taus{Rational(85, 3), Rational(85, 3), Rational(49, 3), Rational(49, 3),
                                   Rational(49, 3)};
  for (int g = 1; g <= 5; ++g) {
    const auto& k = km.generations[g - 1];
    EXPECT_EQ(k.size(), counts[g - 1]) << "generation " << g;
    EXPECT_EQ(thickness(k).thickness, taus[g - 1]) << "generation " << g;
    EXPECT_EQ(oracle::thickness(k), taus[g - 1]) << "generation " << g;
  }
  const auto km8 = construct_km(8, 3);
  EXPECT_EQ(thickness(km8.generations[0]).thickness, Rational(814, 3));
  EXPECT_EQ(thickness(km8.generations[2]).thickness, Rational(778, 3));
  const auto km10 = construct_km(10, 3);
  EXPECT_EQ(thickness(km10.generations[2]).thickness, Rational(7339, 3));
}

TEST(Km, TurningPointsLieInGaps) {
  for (int m : {6, 8, 10}) {
    const auto km = construct_km(m, 3);
    for (const auto& k : km.generations)
      for (const auto& iv : k.intervals) {
        EXPECT_FALSE(iv.contains(Rational(1, 2))) << "m=" << m;
        EXPECT_FALSE(iv.contains(Rational(-1, 2))) << "m=" << m;
      }
  }
}

TEST(Km, RealizedGapAndQuotedValues) {
  const auto km = construct_km(6, 1);
  EXPECT_EQ(km.quoted_thickness_bound(), Rational(342, 11));
  EXPECT_EQ(km.quoted_gap(), Rational(22, 728));
  // The gap (q0, q~0) actually produced by the construction is 8 / (3^m - 1).
  EXPECT_EQ(km.realized_gap(), Rational(8, 728));
  EXPECT_EQ(construct_km(8, 1).realized_gap(), Rational(8, 6560));
}

TEST(Km, ThicknessStrictlyIncreasesInM) {
  for (int g = 1; g <= 3; ++g) {
    const auto t6 = thickness(build_Km(6, g)).thickness;
    const auto t8 = thickness(build_Km(8, g)).thickness;
    const auto t10 = thickness(build_Km(10, g)).thickness;
    EXPECT_LT(t6, t8);
    EXPECT_LT(t8, t10);
  }
}

TEST(Km, RejectsInvalidM) {
  EXPECT_THROW(construct_km(5, 1), std::invalid_argument);
  EXPECT_THROW(construct_km(4, 1), std::invalid_argument);
  EXPECT_THROW(construct_km(6, 0), std::invalid_argument);
}

TEST(Km, GenerationsNestedAndForwardInvariant) {
  const auto km = construct_km(6, 4);
  for (int g = 2; g <= 4; ++g) {
    const auto& prev = km.generations[g - 2].intervals;
    for (const auto& iv : km.generations[g - 1].intervals) {
      for (const Rational& x : {iv.lo, iv.hi}) {
        auto in_prev = [&](const Rational& y) {
          return std::any_of(prev.begin(), prev.end(), [&](const auto& p) { return p.contains(y); });
        };
        EXPECT_TRUE(in_prev(x));
        EXPECT_TRUE(in_prev(oracle::nmap(x)));
      }
    }
  }
}

TEST(Thickness, MiddleThirdsIsOne) {
  const auto k = oracle::middle_thirds(5);
  EXPECT_EQ(thickness(k).thickness, Rational(1));
  EXPECT_EQ(oracle::thickness(k), Rational(1));
}

TEST(Thickness, TwoIntervals) {
  const auto r = thickness(two_intervals());
  EXPECT_EQ(r.thickness, Rational(1));
  EXPECT_EQ(r.witness_gap, (Interval<Rational>{1, 2}));
  ASSERT_EQ(r.ratios.size(), 2u);
}

TEST(Thickness, FloatMatchesExact) {
  const auto k = build_Km(6, 3);
  EXPECT_NEAR(thickness(to_float(k)).thickness, to_double(thickness(k).thickness), 1e-9);
}

TEST(Thickness, RequiresAGap) {
  ExactCantor k;
  k.ambient = {0, 1};
  k.intervals = {{0, 1}};
  EXPECT_THROW(thickness(k), std::domain_error);
}

TEST(Thickness, AffineInvarianceProperty) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 20);
  const auto k = build_Km(6, 3);
  const Rational tau = thickness(k).thickness;
  for (int i = 0; i < 25; ++i) {
    int n = num(rng);
    if (n == 0) n = 1;
    const Rational a(n, den(rng)), b(num(rng), den(rng));
    EXPECT_EQ(thickness(affine_image(k, a, b)).thickness, tau);
  }
  EXPECT_EQ(thickness(affine_image(k, 2, 5)).thickness, tau);
}

TEST(Thickness, MonotoneStackMatchesNaiveOnRandomSets) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> len(1, 30), count(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    ExactCantor k;
    Rational x = 0;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const Rational lo = x;
      x += len(rng);
      k.intervals.push_back({lo, x});
      x += len(rng);
    }
    k.ambient = {0, k.intervals.back().hi};
    EXPECT_EQ(thickness(k).thickness, oracle::thickness(k)) << "trial " << trial;
  }
}

TEST(Markov, ReproducesKm) {
  const auto km = construct_km(6, 4);
  const auto sys = km_branch_system(km);
  for (int g = 1; g <= 4; ++g) {
    const auto r = markov_cantor(sys, g);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.set->intervals, km.generations[g - 1].intervals) << "generation " << g;
  }
}

TEST(Markov, SingleBranch) {
  MarkovBranchSystem sys{{0, 1}, {{{0, Rational(1, 3)}, {3, 0}}}};
  for (int g = 1; g <= 4; ++g) {
    const auto r = markov_cantor(sys, g);
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.set->size(), 1u);
    EXPECT_EQ(r.set->intervals[0], (Interval<Rational>{0, Rational(1) / pow3(g).convert_to<Rational>()}));
  }
}

TEST(Markov, MiddleThirds) {
  for (int g = 1; g <= 5; ++g) {
    const auto r = markov_cantor(thirds_system(), g);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.set->intervals, oracle::middle_thirds(g).intervals);
  }
}

TEST(Markov, DiagnosesContractingAndOverlappingBranches) {
  MarkovBranchSystem contracting{{0, 1}, {{{0, Rational(1, 3)}, {Rational(1, 2), 0}}}};
  const auto r = markov_cantor(contracting, 2);
  EXPECT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_NE(r.diagnostics[0].problem.find("expanding"), std::string::npos);

  MarkovBranchSystem overlapping{{0, 1}, {{{0, Rational(1, 2)}, {2, 0}}, {{Rational(1, 3), 1}, {3, -2}}}};
  const auto o = markov_cantor(overlapping, 2);
  EXPECT_FALSE(o.ok());
  EXPECT_NE(o.diagnostics[0].problem.find("overlaps"), std::string::npos);
}

TEST(GapLemma, IdenticalCopiesIntersect) {
  std::vector<ExactCantor> a;
  for (int g = 1; g <= 4; ++g) a.push_back(build_Km(6, g));
  EXPECT_EQ(gap_lemma_check(a, a).verdict, GapLemmaVerdict::intervals_intersect);
}

TEST(GapLemma, FarTranslateIsOutside) {
  const auto k = build_Km(6, 3);
  auto far = affine_image(k, 1, 10);
  const auto r = gap_lemma_check(k, far);
  EXPECT_NE(r.verdict, GapLemmaVerdict::intervals_intersect);
  EXPECT_TRUE(r.outside_hull);
}

TEST(GapLemma, SmallTranslateIntersectsAtEveryGeneration) {
  std::vector<ExactCantor> a, b;
  for (int g = 1; g <= 6; ++g) {
    a.push_back(build_Km(6, g));
    b.push_back(affine_image(a.back(), 1, Rational(1, 1000)));
    EXPECT_TRUE(families_overlap(a.back(), b.back())) << "generation " << g;
  }
  const auto r = gap_lemma_check(a, b);
  EXPECT_EQ(r.verdict, GapLemmaVerdict::intervals_intersect);
  ASSERT_TRUE(r.thickness_product.has_value());
  EXPECT_EQ(*r.thickness_product, Rational(2401, 9));
  EXPECT_FALSE(r.violates_gap_lemma);
}

TEST(GapLemma, NestedInGap) {
  const auto big = oracle::middle_thirds(3);
  const auto small = affine_image(big, Rational(1, 10), Rational(2, 5));
  EXPECT_TRUE(contained_in_gap(small, big));
  EXPECT_EQ(gap_lemma_check(big, small).verdict, GapLemmaVerdict::second_in_gap_of_first);
  EXPECT_EQ(gap_lemma_check(small, big).verdict, GapLemmaVerdict::first_in_gap_of_second);
}

TEST(Image, IdentityMapKeepsSet) {
  MonotoneMap id{"identity", [](double x) { return x; }, [](double) { return 1.0; }};
  const auto k = to_float(two_intervals());
  const auto img = image_cantor(k, id);
  EXPECT_EQ(img.intervals.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(img.intervals[i].lo, k.intervals[i].lo);
    EXPECT_DOUBLE_EQ(img.intervals[i].hi, k.intervals[i].hi);
  }
}

TEST(Image, ConjugacyImageThicknessBound) {
  const auto k = to_float(build_Km(6, 3));
  const auto chk = image_thickness_check(k, conjugacy_map(), 0.05);
  EXPECT_TRUE(chk.holds);
  EXPECT_NEAR(chk.source_thickness, 49.0 / 3.0, 1e-9);
  EXPECT_GE(chk.image_thickness, chk.bound);
}

TEST(Image, RejectsNonMonotoneMap) {
  MonotoneMap sq{"square", [](double x) { return x * x; }, [](double x) { return 2 * x; }};
  ExactCantor k;
  k.ambient = {-1, 1};
  k.intervals = {{-1, Rational(-1, 2)}, {Rational(1, 2), 1}};
  EXPECT_THROW(image_cantor(to_float(k), sq), std::invalid_argument);
}

TEST(Serialization, CsvRoundTrip) {
  const auto km = construct_km(6, 3);
  std::stringstream ss;
  write_intervals_csv(ss, km.generations);
  const auto back = read_intervals_csv(ss);
  ASSERT_EQ(back.size(), km.generations.size());
  for (std::size_t g = 0; g < back.size(); ++g) {
    EXPECT_EQ(back[g].generation, km.generations[g].generation);
    EXPECT_EQ(back[g].intervals, km.generations[g].intervals);
  }
}

TEST(Serialization, CsvSkipsCommentLines) {
  std::stringstream ss;
  ss << "# config_hash=0\n";
  write_intervals_csv(ss, {build_Km(6, 1)});
  EXPECT_EQ(read_intervals_csv(ss).front().size(), 6u);
}

TEST(Serialization, CsvRejectsBadHeader) {
  std::stringstream ss("a,b\n1,2\n");
  EXPECT_THROW(read_intervals_csv(ss), std::runtime_error);
}

TEST(Serialization, JsonCarriesExactRationals) {
  const auto j = to_json(thickness(build_Km(6, 1)));
  EXPECT_EQ(j.at("thickness").at("exact"), "85/3");
}
