#include "commands.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;
using cubiclab::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cubiclab_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json json_file(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"cantor", "--m", "5", "--out", scratch("m5").string()}).code, 2);
  EXPECT_EQ(invoke({"renorm", "--lambda", "0.6", "--out", scratch("lam").string()}).code, 2);
  EXPECT_EQ(invoke({"renorm", "--n-min", "0", "--out", scratch("nmin").string()}).code, 2);
  EXPECT_EQ(invoke({"attractor", "--b", "0", "--out", scratch("b0").string()}).code, 2);
  EXPECT_EQ(invoke({"verify", "--skip", "bogus", "--out", scratch("skip").string()}).code, 2);
}

TEST(Cli, ConfigFileUnknownKeyIsUsageError) {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"parameters": {"mm": 6}})";
  const auto r = invoke({"--config", (dir / "c.json").string(), "cantor", "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mm"), std::string::npos);
}

TEST(Cli, CantorExitStatusReflectsBound) {
  // The thickness bound does not hold for K_6, so the check reports failure.
  const auto dir = scratch("cantor");
  const auto r = invoke({"cantor", "--m", "6", "--gen", "3", "--out", dir.string()});
  EXPECT_EQ(r.code, 1);
  const auto t = json_file(dir / "thickness.json");
  EXPECT_EQ(t["report"]["thickness"]["exact"], "49/3");
  EXPECT_EQ(t["bound"], "342/11");
  EXPECT_EQ(t["bound_holds"], false);
  EXPECT_EQ(first_line(dir / "intervals.csv").rfind("# schema_version=1 config_hash=", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, RenormUnperturbedRate) {
  const auto dir = scratch("renorm");
  const auto r = invoke({"renorm", "--perturbation", "none", "--n-max", "8", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto d = json_file(dir / "decay.json");
  EXPECT_NEAR(d["fit"]["predicted_log_rate"].get<double>(), std::log(0.4), 1e-12);
  EXPECT_TRUE(fs::exists(dir / "residual.csv"));
}

TEST(Cli, AttractorArtifacts) {
  const auto dir = scratch("attractor");
  const auto r = invoke({"attractor", "--steps", "100000", "--sample", "1000", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* f : {"fixed_points.csv", "attractor.csv", "lyapunov.json", "unstable_manifold_origin.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_GT(json_file(dir / "lyapunov.json")["exponent"].get<double>(), 0.5);
}

TEST(Cli, TangencyEmptyScan) {
  const auto dir = scratch("tangency");
  const auto r = invoke({"tangency", "--t-min", "0", "--t-max", "0", "--samples", "1", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "events.csv");
  std::string comment, header, row;
  std::getline(in, comment);
  std::getline(in, header);
  EXPECT_EQ(header, "t,region,x,y,min_gap,gap_slope,classification");
  EXPECT_FALSE(std::getline(in, row) && !row.empty());
}

TEST(Cli, ReplayIsByteIdentical) {
  const auto a = scratch("replay_a"), b = scratch("replay_b");
  const std::vector<std::string> base{"attractor", "--steps", "20000", "--sample", "500"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--threads", "2", "--out", b.string()});
  ASSERT_EQ(invoke(args_a).code, 0);
  ASSERT_EQ(invoke(args_b).code, 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
    ++files;
  }
  EXPECT_GE(files, 5u);
}

TEST(Cli, VerifySkipAndInjection) {
  const std::string skip = "cantor,conjugacy,renorm,tangency,wangyoung,lyapunov,structural";
  const auto dir = scratch("verify");
  auto ok = invoke({"verify", "--skip", skip, "--out", dir.string()});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  const auto v = json_file(dir / "verify.json");
  EXPECT_TRUE(v.dump().find("velocity") != std::string::npos);

  auto bad = invoke({"verify", "--skip", skip, "--constant", "velocity.dy_dmu=0.3", "--out", dir.string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("velocity"), std::string::npos);

  EXPECT_EQ(invoke({"verify", "--skip", skip, "--constant", "nope=1", "--out", dir.string()}).code, 2);
}
