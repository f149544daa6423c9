#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "muskat/cli.hpp"

using namespace muskat;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "muskat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

io::Table run_table(std::vector<std::string> args) {
  const auto r = run_cli(std::move(args));
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  return io::read_csv(is);
}

fs::path tmp(const std::string& name) { return fs::path(MUSKAT_TEST_TMPDIR) / name; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

/// Profile table -> SolutionProfile over one minimal period.
SolutionProfile as_profile(const io::Table& t) {
  SolutionProfile s;
  s.lambda = t.meta_number("lambda");
  s.period = t.meta_number("period");
  const std::size_t per = t.rows.size() / static_cast<std::size_t>(t.meta_number("l"));
  for (std::size_t i = 0; i < per; ++i) s.samples.push_back({t.rows[i][0], t.rows[i][1], t.rows[i][2]});
  return s;
}

}  // namespace

TEST(Cli, ConstantsDefaults) {
  const auto t = run_table({"constants"});
  EXPECT_EQ(t.command, "constants");
  EXPECT_NEAR(t.meta_number("lambda_star"), 0.2909, 5e-5);
  EXPECT_NEAR(t.meta_number("h_star"), 2.622, 5e-4);
  EXPECT_NE(std::get<std::string>(*t.find("lambda_star_source")).find("B(3/4,1/2)"), std::string::npos);
  ASSERT_EQ(t.rows.size(), 5u);
  EXPECT_NEAR(t.rows[1][1], 0.25, 1e-15);
}

TEST(Cli, ConstantsRegimeText) {
  const std::string h = std::to_string(constants().h_star / 2);
  const auto t = run_table({"constants", "--h", h});
  EXPECT_EQ(std::get<std::string>(*t.find("regime")), "regime (i) TOUCHES_BOUNDARY");
  const auto t3 = run_table({"constants", "--h", "10"});
  EXPECT_EQ(std::get<std::string>(*t3.find("regime")), "regime (iii) SLOPE_BLOWUP");
}

TEST(Cli, InvalidInputsExitTwo) {
  auto r = run_cli({"constants", "--rho-plus", "0.5", "--rho-minus", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("rho_plus must exceed rho_minus"), std::string::npos);
  EXPECT_EQ(run_cli({"constants", "--precision", "3"}).code, 2);
  EXPECT_EQ(run_cli({"constants", "--format", "xml"}).code, 2);
  EXPECT_EQ(run_cli({"nosuch"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"profile", "--lambda", "0.9", "--gamma", "1"}).code, 2);
  EXPECT_EQ(run_cli({"profile", "--parity", "sideways", "--lambda", "0.9"}).code, 2);
  EXPECT_EQ(run_cli({"profile"}).code, 2);
}

TEST(Cli, BranchRowsAndMonotoneAmplitude) {
  const auto t = run_table({"branch", "--l", "1", "--n", "50"});
  ASSERT_EQ(t.rows.size(), 50u);
  const auto a = t.column("amplitude"), l = t.column("lambda");
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_GT(t.rows[i][l], t.rows[i - 1][l]);
    EXPECT_LT(t.rows[i][a], t.rows[i - 1][a]);
  }
  EXPECT_EQ(std::get<std::string>(*t.find("regime")), "regime (i) TOUCHES_BOUNDARY");
  EXPECT_NEAR(t.meta_number("endpoint_amplitude"), 1.0, 1e-10);
}

TEST(Cli, BranchModeScaling) {
  const auto t1 = run_table({"branch", "--l", "1", "--n", "20", "--h", "4"});
  const auto t3 = run_table({"branch", "--l", "3", "--n", "20", "--h", "4"});
  ASSERT_EQ(t1.rows.size(), t3.rows.size());
  const auto g = t1.column("gamma");
  for (std::size_t i = 0; i < t1.rows.size(); ++i) EXPECT_NEAR(t3.rows[i][g], t1.rows[i][g] / 9, 1e-15);
}

TEST(Cli, BranchTruncationFlag) {
  const std::string cfg = tmp("alpha_cap.json").string();
  std::ofstream(cfg) << R"({"alpha_max": 1000, "h": 5})";
  const auto t = run_table({"branch", "--n", "50", "--config", cfg});
  ASSERT_EQ(t.rows.size(), 50u);
  EXPECT_GT(t.meta_number("truncated_points"), 0.0);
  EXPECT_EQ(t.rows[0][t.column("truncated_flag")], 1.0);
  EXPECT_TRUE(std::isnan(t.rows[0][t.column("alpha")]));
  EXPECT_EQ(t.rows.back()[t.column("truncated_flag")], 0.0);
}

TEST(Cli, ProfileFlatAndEven) {
  const auto z = run_table({"profile", "--lambda", "1", "--n", "64"});
  EXPECT_EQ(z.meta_number("residual"), 0.0);
  for (const auto& r : z.rows) EXPECT_EQ(r[1], 0.0);

  const auto e = run_table({"profile", "--lambda", "0.9", "--parity", "even"});
  ASSERT_EQ(e.rows.size(), 512u);
  const double amp = max_amplitude(0.9, alpha_of_lambda(0.9));
  EXPECT_NEAR(e.rows[0][1], amp, 1e-10);
  for (std::size_t i = 1; i < 512; ++i) EXPECT_NEAR(e.rows[512 - i][1], e.rows[i][1], 1e-10);
  EXPECT_LT(e.meta_number("residual"), 1e-6);

  const auto m = run_table({"profile", "--lambda", "0.9", "--parity", "even", "--sign", "minus"});
  EXPECT_NEAR(m.rows[0][1], -amp, 1e-10);
}

TEST(Cli, ProfileOutOfWindow) {
  const auto r = run_cli({"profile", "--lambda", "0.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("(lambda_h, 1]"), std::string::npos);
  EXPECT_NE(r.err.find("(0.729953888"), std::string::npos);
  EXPECT_EQ(run_cli({"profile", "--lambda", "1.2"}).code, 2);
}

TEST(Cli, ProfileByGammaAndMode) {
  const auto t = run_table({"profile", "--gamma", "0.4", "--l", "2", "--h", "5", "--n", "256"});
  EXPECT_NEAR(t.meta_number("lambda"), 2.5, 1e-15);
  EXPECT_NEAR(t.meta_number("period"), pi, 1e-9);
  ASSERT_EQ(t.rows.size(), 256u);
  EXPECT_NEAR(t.rows[128][0], pi, 1e-9);
  EXPECT_EQ(t.rows[128][1], t.rows[0][1]);
  EXPECT_EQ(run_cli({"profile", "--lambda", "2.5", "--l", "3", "--n", "256"}).code, 2);
}

TEST(Cli, PendulumMetadata) {
  const auto flat = run_table({"pendulum", "--lambda", "1", "--n", "64"});
  EXPECT_NEAR(flat.meta_number("L_formula"), 2 * pi, 1e-14);
  EXPECT_NEAR(flat.meta_number("L_arclength"), 2 * pi, 1e-12);
  EXPECT_EQ(flat.rows.size(), 64u);
  EXPECT_GE(flat.meta_number("profile_samples"), 64.0);

  const auto t = run_table({"pendulum", "--lambda", "0.9"});
  EXPECT_LE(std::abs(t.meta_number("L_difference")), 1e-6);
  EXPECT_NEAR(t.meta_number("sup_theta"), t.meta_number("arctan_alpha"), 1e-8);
}

TEST(Cli, PendulumWarnsNearLambdaStar) {
  const std::string lam = std::to_string(constants().lambda_star + 1e-6);
  const auto r = run_cli({"pendulum", "--lambda", lam, "--n", "256"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("# warning:"), std::string::npos);
  const auto s = run_cli({"pendulum", "--lambda", "0.2"});
  EXPECT_EQ(s.code, 2);
}

TEST(Cli, FilesRoundTripAndRevalidate) {
  for (const std::string fmt : {"csv", "json"}) {
    const auto path = tmp("profile." + fmt);
    const auto r = run_cli({"profile", "--lambda", "0.8", "--format", fmt, "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    const io::Table t = fmt == "csv" ? io::read_csv(f) : io::read_json(f);
    const auto s = as_profile(t);
    const auto res = residual(s);
    EXPECT_LT(res.ode_residual_max, 1e-6) << fmt;
    EXPECT_LT(res.mean_abs, 1e-9) << fmt;
    EXPECT_NEAR(res.ode_residual_max, t.meta_number("residual"), 1e-12);
  }
}

TEST(Cli, DeterministicOutput) {
  const auto a = tmp("det_a.json"), b = tmp("det_b.json");
  for (const auto& p : {a, b}) {
    ASSERT_EQ(run_cli({"branch", "--n", "30", "--format", "json", "--out", p.string()}).code, 0);
  }
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
}

TEST(Cli, ConfigPrecedence) {
  const std::string cfg = tmp("cfg.json").string();
  std::ofstream(cfg) << R"({"h": 5, "precision": 8})";
  const auto t = run_table({"constants", "--config", cfg});
  EXPECT_EQ(t.meta_number("h"), 5.0);
  const auto t2 = run_table({"constants", "--config", cfg, "--h", "1"});
  EXPECT_EQ(t2.meta_number("h"), 1.0);
  EXPECT_NE(run_cli({"constants", "--config", cfg}).out.find("5.0000000e+00"), std::string::npos);

  const std::string bad = tmp("bad.json").string();
  std::ofstream(bad) << R"({"hieght": 5})";
  const auto r = run_cli({"constants", "--config", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("hieght"), std::string::npos);
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run_cli({"constants", "--config", bad}).code, 2);
  EXPECT_EQ(run_cli({"constants", "--config", tmp("missing.json").string()}).code, 2);
}

TEST(Cli, ClassifyAndCoexist) {
  const auto c = run_table({"classify", "--h", "1", "--l", "3"});
  ASSERT_EQ(c.rows.size(), 3u);
  EXPECT_EQ(c.rows[0][1], 1.0);
  EXPECT_EQ(c.rows[2][1], 3.0);
  const auto x = run_table({"coexist", "--h", "100", "--l", "4"});
  ASSERT_FALSE(x.rows.empty());
  EXPECT_EQ(x.rows[0][0], 2.0);
}

TEST(Cli, ExpansionCheck) {
  const auto t = run_table({"expansion-check", "--eps", "0.02", "0.04", "0.08"});
  EXPECT_LT(t.meta_number("relative_error"), 0.02);
  EXPECT_EQ(t.rows.size(), 3u);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("branch"), std::string::npos);
}
