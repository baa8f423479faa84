#include "cubiclab/acceptance.hpp"

#include <gtest/gtest.h>

using namespace cubiclab::acceptance;

namespace {

Options only(const std::string& key) {
  Options o;
  for (const auto& c : criteria())
    if (c.key != key) o.skip.insert(c.key);
  return o;
}

const CriterionResult& result_for(const SuiteReport& r, const std::string& key) {
  for (const auto& c : r.results)
    if (c.key == key) return c;
  throw std::logic_error("missing " + key);
}

}  // namespace

TEST(Registry, EightCriteriaWithAliases) {
  ASSERT_EQ(criteria().size(), 8u);
  for (std::size_t i = 0; i < criteria().size(); ++i) EXPECT_EQ(criteria()[i].id, static_cast<int>(i + 1));
  EXPECT_EQ(canonical_key("lyapunov"), "attractor");
  EXPECT_EQ(canonical_key("thickness"), "cantor");
  EXPECT_EQ(canonical_key("misiurewicz"), "wangyoung");
  EXPECT_EQ(canonical_key("5"), "tangency");
  EXPECT_EQ(canonical_key("velocity"), "velocity");
  EXPECT_EQ(canonical_key("nope"), "");
}

TEST(Suite, SkipMarksSkipped) {
  const auto r = run_suite(only("velocity"));
  ASSERT_EQ(r.results.size(), 8u);
  for (const auto& c : r.results) EXPECT_EQ(c.skipped, c.key != "velocity") << c.key;
  EXPECT_TRUE(result_for(r, "velocity").passed);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.failing().empty());
}

TEST(Suite, InjectedConstantFailsNamedCriterion) {
  auto o = only("velocity");
  o.constants["velocity.dy_dmu"] = 0.3;
  const auto r = run_suite(o);
  EXPECT_FALSE(r.passed());
  ASSERT_EQ(r.failing().size(), 1u);
  EXPECT_EQ(r.failing()[0], "velocity");
  EXPECT_FALSE(result_for(r, "velocity").failure.empty());
  EXPECT_NE(r.table().find("FAIL"), std::string::npos);
}

TEST(Suite, InjectedConstantFailsConjugacy) {
  auto o = only("conjugacy");
  EXPECT_TRUE(run_suite(o).passed());
  o.constants["conjugacy.tolerance"] = 0.0;
  const auto r = run_suite(o);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failing(), std::vector<std::string>{"conjugacy"});
}

TEST(Suite, RejectsUnknownNames) {
  Options o;
  o.skip.insert("bogus");
  EXPECT_THROW(run_suite(o), std::invalid_argument);
  Options c = only("velocity");
  c.constants["velocity.nonexistent"] = 1.0;
  EXPECT_THROW(run_suite(c), std::invalid_argument);
}

TEST(Suite, AliasSkips) {
  auto o = only("velocity");
  o.skip.erase("attractor");
  o.skip.insert("lyapunov");
  const auto r = run_suite(o);
  EXPECT_TRUE(result_for(r, "attractor").skipped);
}

TEST(Suite, JsonIsDeterministic) {
  const auto a = run_suite(only("velocity")).to_json();
  const auto b = run_suite(only("velocity")).to_json();
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a.dump().find("\"seconds\""), std::string::npos);
}

TEST(Constants, DefaultsPresent) {
  const auto& c = default_constants();
  for (const char* k : {"cantor.q0", "velocity.dy_dmu", "tangency.n", "wangyoung.h_lower", "attractor.a",
                        "structural.roundtrip_tolerance"})
    EXPECT_TRUE(c.contains(k)) << k;
  EXPECT_EQ(c["tangency.n"], 6);
}
