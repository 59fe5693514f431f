#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bform/io.hpp"

using namespace bform;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BFORM_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

}  // namespace

TEST(Cli, EigenJson) {
  const auto r = run("eigen '[1,0,0,0,1]'");
  ASSERT_EQ(r.status, 0);
  const auto j = parse_json(r.out);
  EXPECT_EQ(j["eigenpairs"].size(), 4u);
  EXPECT_EQ(j["form"]["degree"], 4);
}

TEST(Cli, CircleIsAVariantNotAnError) {
  const auto r = run("eigen --form '[1,0,2,0,1]'");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(parse_json(r.out)["degenerate"], "circle");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("eigen '[1,0,'").status, 2);
  EXPECT_EQ(run("eigen '[1,2,3]' --degree 3").status, 2);
  EXPECT_EQ(run("eigen '[0,0,0]'").status, 3);
  EXPECT_EQ(run("critical '[1,0,2,0,1]' -k 2").status, 4);
  EXPECT_EQ(run("spectral '[1,0,3,0,3,0,1]'").status, 4);
  EXPECT_EQ(run("critical '[1,2,3,4,5]' -k 3").status, 2);
  EXPECT_EQ(run("rez -d 5").status, 2);
  EXPECT_EQ(run("nosuchcommand").status, 2);
  EXPECT_EQ(run("").status, 2);
}

TEST(Cli, CriticalIsDeterministicAndReparses) {
  const std::string args = "--seed 3 critical '[2,0,0,1,0]' -k 2";
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = parse_json(a.out);
  EXPECT_EQ(j["honest"], 6);
  EXPECT_EQ(j["boundary"], 1);
  EXPECT_FALSE(j["budget_exhausted"].get<bool>());
  for (const auto& p : j["points"]) {
    EXPECT_LE(p["grad_residual"].get<double>(), 1e-8);
    EXPECT_LE(p["cert_residual"].get<double>(), 1e-8);
  }
}

TEST(Cli, RezAndCounts) {
  const auto r = run("rez -d 2 --phi 0.3");
  ASSERT_EQ(r.status, 0);
  EXPECT_NEAR(parse_json(r.out)["c_d"].get<double>(), 1.0, 1e-12);
  const auto c = run("counts '[24,-50,35,-10,1]'");
  ASSERT_EQ(c.status, 0);
  const auto j = parse_json(c.out);
  EXPECT_EQ(j["real_roots"], 4);
  EXPECT_EQ(j["real_crit1"], 4);
  EXPECT_EQ(j["real_crit2"], 3);
}

TEST(Cli, TextOutput) {
  const auto r = run("--text best '[1,0,0,0,1]' -k 1");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("dist 1"), std::string::npos);
  EXPECT_THROW(parse_json(r.out), Error);
}

TEST(Cli, RealRootBoundSweep) {
  const auto r = run("maccioni -d 3 --samples 50");
  ASSERT_EQ(r.status, 0);
  const auto j = parse_json(r.out);
  EXPECT_EQ(j["samples"], 50);
  EXPECT_TRUE(j["violations"].empty());
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, GoldenFiles) {
  EXPECT_EQ(run("eigen '[1,0,0,0,1]'").out, slurp(std::string(BFORM_GOLDEN) + "/eigen_fermat_quartic.json"));
  EXPECT_EQ(run("rez -d 6").out, slurp(std::string(BFORM_GOLDEN) + "/rez_6.json"));
}

TEST(Cli, EverySubcommandReparses) {
  for (const std::string args :
       {"eigen '[3,1,4,1,5]'", "critical '[3,1,4,1,5]' -k 2 --budget 100", "best '[3,1,4,1,5]' -k 2 --budget 100",
        "counts '[3,1,4,1,5]'", "spectral '[3,1,4,1,5]'", "rez -d 4 --phi 0.37", "table --budget 8",
        "maccioni --budget 20"}) {
    const auto r = run(args);
    EXPECT_LE(r.status, 1) << args;
    EXPECT_NO_THROW(parse_json(r.out)) << args;
    EXPECT_EQ(r.out, run(args).out) << args;
  }
}

TEST(Cli, FermatQuarticHasADistanceZeroRealRankTwoPoint) {
  const auto r = run("critical '[1,0,0,0,1]' -k 2 --field real");
  ASSERT_EQ(r.status, 0);
  const auto j = parse_json(r.out);
  bool exact = false;
  for (const auto& p : j["points"]) exact = exact || p["distance"].get<double>() <= 1e-10;
  EXPECT_TRUE(exact);
}

TEST(Cli, FermatQuinticSpectralCoefficients) {
  const auto r = run("spectral '[1,0,0,0,0,1]'");
  ASSERT_EQ(r.status, 0);
  const auto c = parse_json(r.out)["coeffs"];
  ASSERT_EQ(c.size(), 5u);
  EXPECT_NEAR(c[0].get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(c[1].get<double>(), 1.0, 1e-10);
  for (int i = 2; i < 5; ++i) {
    const double mag = c[i].is_array() ? std::hypot(c[i][0].get<double>(), c[i][1].get<double>()) : std::abs(c[i].get<double>());
    EXPECT_LE(mag, 1e-10);
  }
}

TEST(Cli, RezSixHasFourSummands) {
  const auto j = parse_json(run("rez -d 6").out);
  EXPECT_EQ(j["summands"].size(), 4u);
  EXPECT_LE(j["residual"].get<double>(), 1e-10);
}
