// Runs the padyn binary on the fixtures in problems/.

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  const std::string err_path = testing::TempDir() + "padyn_cli_stderr.txt";
  const std::string cmd = std::string(PADYN_BIN) + " " + args + " 2>" + err_path;
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

std::string fixture(const std::string& name) { return std::string(PADYN_PROBLEMS) + "/" + name; }

TEST(Cli, CheckVerdictsAndExitCodes) {
  auto r = run("check " + fixture("diagonal.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["overall"]["verdict"], "InvariantCandidate");

  r = run("check " + fixture("hyperplane_hit.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  EXPECT_EQ(report["schema_version"], 1);
  EXPECT_EQ(report["overall"]["verdict"], "Finite");
  EXPECT_EQ(report["overall"]["indices"], json::array({3}));
  EXPECT_EQ(report["overall"]["complete"], true);

  r = run("check " + fixture("unequal_multipliers.json"));
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("common-multiplier"), std::string::npos) << r.err;
}

TEST(Cli, ReportFileMatchesStdout) {
  const std::string path = testing::TempDir() + "padyn_cli_report.json";
  const auto direct = run("check " + fixture("hyperplane_hit.json"));
  const auto to_file = run("check " + fixture("hyperplane_hit.json") + " --report " + path);
  EXPECT_EQ(to_file.code, 0);
  EXPECT_TRUE(to_file.out.empty());
  EXPECT_EQ(slurp(path), direct.out);
}

TEST(Cli, InputErrors) {
  auto r = run("check " + fixture("malformed.json"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("polynomials[1][2]"), std::string::npos) << r.err;

  const std::string broken = testing::TempDir() + "padyn_cli_broken.json";
  std::ofstream(broken) << "{\"prime\": 5,\n \"polynomials\": [[1, 2]\n";
  r = run("check " + broken);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  EXPECT_EQ(run("check " + fixture("does-not-exist.json")).code, 3);
  EXPECT_EQ(run("linearize " + fixture("separated.json") + " --map-index 7").code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
}

TEST(Cli, Linearize) {
  const auto r = run("linearize " + fixture("separated.json") + " --map-index 0 --truncation 6");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["isometry_radius_valuation"], 2);
  const auto& c = j["exp_coefficients"];
  ASSERT_GE(c.size(), 2u);
  EXPECT_EQ(c[1]["n"], 2);
  EXPECT_EQ(c[1]["value"]["valuation"], -1);
  // 1/(p^2 - p) = 1/20: its unit part 1/4 = 4 + 3*5 + 3*5^2 + ...
  EXPECT_EQ(c[1]["value"]["digits"][0], 4);
  EXPECT_EQ(c[1]["value"]["digits"][1], 3);
}

TEST(Cli, FixedPoints) {
  const auto r = run("fixed-points " + fixture("separated.json") + " --map-index 0");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pts = json::parse(r.out)["fixed_points"];
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0]["classification"], "attracting");
  EXPECT_EQ(pts[0]["point"]["zero"], true);
  EXPECT_EQ(pts[1]["classification"], "indifferent");
  // 1 - 5 = -4 = 1 + 4*5 + 4*5^2 + ...
  EXPECT_EQ(pts[1]["point"]["digits"], json::array({1, 4, 4, 4, 4, 4, 4, 4}));
}

TEST(Cli, Orbit) {
  const auto r = run("orbit " + fixture("linear.json") + " --steps 5");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto orbit = json::parse(r.out)["orbit"];
  ASSERT_EQ(orbit.size(), 6u);
  for (std::size_t n = 0; n < orbit.size(); ++n) {
    EXPECT_EQ(orbit[n]["distance_valuations"], json::array({static_cast<int>(n)}));
  }
}

}  // namespace
