#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sobolev_ball/cli.hpp"

using namespace sobolev_ball;
namespace fs = std::filesystem;

namespace {
struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sobolev_ball_cli_test";
  fs::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST(Cli, BasisCounts) {
  auto r = run({"basis", "--family", "I", "--d", "2", "--n", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out).size(), 4u);

  r = run({"basis", "--family", "II", "--d", "3", "--n", "2"});
  ASSERT_EQ(r.code, 0);
  int radial = 0;
  for (const auto& e : Json::parse(r.out)) radial += e["j"].get<int>() == 1 ? 1 : 0;
  EXPECT_EQ(radial, 1);

  r = run({"basis", "--family", "Wmu", "--mu", "1", "--d", "2", "--n", "0"});
  ASSERT_EQ(r.code, 0);
  const Json b = Json::parse(r.out);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0]["poly"]["terms"].size(), 1u);
}

TEST(Cli, GramExamples) {
  auto r = run({"gram", "--family", "I", "--d", "2", "--max-degree", "5", "--lambda", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(Json::parse(r.out)["max_offdiag"].get<double>(), 1e-10);

  r = run({"gram", "--family", "Delta", "--d", "2", "--max-degree", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["closed_form_nominal"].get<bool>());
  EXPECT_TRUE(j.contains("ratio_min"));

  r = run({"gram", "--family", "S", "--d", "3", "--max-degree", "4", "--lambda", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = Json::parse(r.out);
  for (const auto& e : s["diag_vs_closed_form"]) {
    const int n = e["n"].get<int>();
    EXPECT_NEAR(e["measured"].get<double>(), 2.0 * n * n + 1.0, 1e-11);
  }
}

TEST(Cli, GramIsByteIdenticalAndThreadIndependent) {
  const std::vector<std::string> base{"gram", "--family", "II", "--d", "3", "--max-degree", "4", "--lambda", "0.5"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1"});
  b.insert(b.end(), {"--threads", "4"});
  const auto ra = run(a), rb = run(b), rc = run(a);
  ASSERT_EQ(ra.code, 0);
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(ra.out, rc.out);
}

TEST(Cli, FailingToleranceExitsOne) {
  const auto r = run({"gram", "--family", "I", "--d", "2", "--max-degree", "3", "--tolerance", "1e-30"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("tolerance"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"gram", "--family", "Q", "--d", "2", "--max-degree", "2"}).code, 2);
  EXPECT_EQ(run({"gram", "--family", "I", "--d", "1", "--max-degree", "2"}).code, 2);
  EXPECT_EQ(run({"gram", "--family", "I", "--d", "2", "--max-degree", "2", "--lambda", "-1"}).code, 2);
  EXPECT_EQ(run({"basis", "--family", "I", "--d", "2"}).code, 2);
  EXPECT_EQ(run({"gram", "--unknown"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"expand", "--d", "2", "--poly", "1 2 z"}).code, 2);
  EXPECT_EQ(run({"expand", "--d", "2", "--input", "/nonexistent/file"}).code, 2);
  EXPECT_EQ(run({"expand", "--d", "2"}).code, 2);
}

TEST(Cli, ExpandWritesTableAndResidual) {
  const auto in = scratch("f.txt");
  std::ofstream(in) << "# f\n1 3 1\n0.5 0 0\n-2 1 1\n0.25 0 4\n";
  const auto out = scratch("table.json");
  const auto r = run({"expand", "--family", "I", "--d", "2", "--max-degree", "4", "--input", in.string(), "--output",
                      out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());  // stdout stays silent with --output
  std::ifstream f(out);
  const Json t = Json::parse(f);
  EXPECT_EQ(t["entries"].size(), 15u);
  EXPECT_EQ(t["family"], "I");
  const auto pos = r.err.find("reconstruction_residual=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::stod(r.err.substr(pos + 24)), 1e-10);
}

TEST(Cli, ExpandBasisElementHasOneEntry) {
  const auto u = basis_I(3, 2)[2];
  const auto r = run({"expand", "--family", "I", "--d", "2", "--max-degree", "3", "--poly",
                      canonical_dump(to_json(u.poly))});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json t = Json::parse(r.out);
  int nonzero = 0;
  for (const auto& e : t["entries"]) nonzero += std::abs(e[3].get<double>()) > 1e-12 ? 1 : 0;
  EXPECT_EQ(nonzero, 1);
}

TEST(Cli, ExpandEvaluatorBudget) {
  const auto bad = run({"expand", "--d", "2", "--poly", "1 3 1", "--sample", "--quad-degree", "3"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("budget"), std::string::npos);
  EXPECT_EQ(run({"expand", "--d", "2", "--poly", "1 3 1", "--sample"}).code, 0);
}

TEST(Cli, ParsevalExamples) {
  auto r = run({"parseval", "--d", "3", "--poly", "1 1 0 0"});
  ASSERT_EQ(r.code, 0);
  Json j = Json::parse(r.out);
  EXPECT_NEAR(j["lhs"].get<double>(), 1.0 / 3.0, 1e-15);
  EXPECT_LE(j["relative_gap"].get<double>(), 1e-12);

  r = run({"parseval", "--d", "2", "--poly", "1 0 0"});
  ASSERT_EQ(r.code, 0);
  j = Json::parse(r.out);
  EXPECT_EQ(j["lhs"].get<double>(), 0.0);
  EXPECT_EQ(j["rhs_total"].get<double>(), 0.0);

  const auto g = run({"parseval", "--d", "2", "--poly", "1 0 0;-1 2 0;-1 0 2"});
  const auto a = run({"parseval", "--d", "2", "--route", "annihilated", "--poly", "1 0 0"});
  ASSERT_EQ(g.code, 0);
  ASSERT_EQ(a.code, 0);
  EXPECT_NEAR(Json::parse(g.out)["lhs"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(Json::parse(a.out)["rhs_total"].get<double>(), Json::parse(g.out)["rhs_total"].get<double>(), 1e-13);

  // Truncating below the input degree opens a gap.
  EXPECT_EQ(run({"parseval", "--d", "2", "--poly", "1 3 0", "--max-degree", "1"}).code, 1);
}

TEST(Cli, CsvOutput) {
  const auto r = run({"expand", "--d", "2", "--poly", "1 1 0", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("n,j,nu,value\n", 0), 0u);
  EXPECT_EQ(run({"expand", "--d", "2", "--poly", "1 1 0", "--format", "xml"}).code, 2);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"command": "gram", "family": "I", "d": 2, "max_degree": 3, "lambda": 4.0})";
  const auto from_file = run({"--config", cfg.string()});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(Json::parse(from_file.out)["spec"]["lambda"].get<double>(), 4.0);
  const auto overridden = run({"gram", "--config", cfg.string(), "--lambda", "0.5"});
  ASSERT_EQ(overridden.code, 0);
  EXPECT_EQ(Json::parse(overridden.out)["spec"]["lambda"].get<double>(), 0.5);
  std::ofstream(scratch("bad.json")) << "{not json";
  EXPECT_EQ(run({"gram", "--config", scratch("bad.json").string()}).code, 2);
}

TEST(Cli, HarmonicCacheDirectory) {
  const auto dir = scratch("cache");
  fs::remove_all(dir);
  ::setenv("SOBOLEV_BALL_CACHE", dir.c_str(), 1);
  const auto first = run({"gram", "--family", "I", "--d", "4", "--max-degree", "2"});
  const auto second = run({"gram", "--family", "I", "--d", "4", "--max-degree", "2"});
  ::unsetenv("SOBOLEV_BALL_CACHE");
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, second.out);
  EXPECT_TRUE(fs::exists(dir / "harmonic_d4_n2.json"));
  std::ifstream f(dir / "harmonic_d4_n2.json");
  EXPECT_EQ(harmonic_basis_from_json(Json::parse(f)).size(), dim_harmonic(2, 4));
}
