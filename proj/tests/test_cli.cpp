#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "levyou/cli.hpp"
#include "levyou/presets.hpp"

using namespace levyou;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    ADD_FAILURE() << "no column " << name;
    return 0;
  }
  double num(std::size_t r, const std::string& name) const { return std::stod(rows[r][col(name)]); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  return f;
}

Table parse(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("levyou_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Solve, HeaderZerosAndOrdering) {
  PresetOverrides ov;
  ov.b_frac = 0.5;
  const Preset p = make_preset("benth2012", ov);
  const double rev = p.b() / p.coeffs.lambda;
  std::ostringstream grid;
  grid.precision(17);
  grid << 0.0 << ":" << 2.0 * rev << ":41";
  const CliRun r = run({"solve", "--b-frac", "0.5", "--s-grid", grid.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"s", "pi_exact", "pi_merton", "pi_jump_mean", "bound_merton",
                                                 "bound_jump_mean"}));
  ASSERT_EQ(t.rows.size(), 41u);
  bool saw_level = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double s = t.num(i, "s");
    EXPECT_LE(t.num(i, "pi_merton"), t.num(i, "pi_exact") + 1e-8);
    EXPECT_LE(t.num(i, "pi_exact"), t.num(i, "pi_jump_mean") + 1e-8);
    if (s >= rev) {
      EXPECT_EQ(t.num(i, "pi_exact"), 0.0);
      EXPECT_EQ(t.num(i, "pi_merton"), 0.0);
      EXPECT_EQ(t.num(i, "pi_jump_mean"), 0.0);
    }
    saw_level = saw_level || std::abs(s - rev) < 1e-12 * rev;
    EXPECT_EQ(t.rows[i][t.col("bound_merton")], "inf");
  }
  EXPECT_TRUE(saw_level);
}

TEST(Solve, GaussianBoundsAreNan) {
  const CliRun r = run({"solve", "--preset", "gaussian", "--s", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_TRUE(std::isnan(t.num(0, "bound_merton")));
  EXPECT_NEAR(t.num(0, "pi_exact"), (0.05 - 0.3333 / 24.0 * 2.0) / 0.01, 1e-8);
}

TEST(Figure, WritesFilesAndSummary) {
  const auto dir = scratch_dir("figure");
  const CliRun r = run({"figure", "--out", dir.string(), "--s-grid", "0:1:81"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"fraction", "b", "max_gap_jump_mean", "max_gap_merton",
                                                 "bound_jump_mean", "ordering_holds", "csv", "svg"}));
  ASSERT_EQ(t.rows.size(), 4u);
  for (const char* tag : {"b_150pct", "b_80pct", "b_50pct", "b_20pct"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / (std::string(tag) + ".csv"))) << tag;
    const std::string svg = slurp(dir / (std::string(tag) + ".svg"));
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.rows[i][t.col("ordering_holds")], "yes");
    EXPECT_LE(t.num(i, "max_gap_jump_mean"), t.num(i, "bound_jump_mean"));
  }
  // Merton error shrinks with the drift
  EXPECT_LT(t.num(3, "max_gap_merton"), t.num(0, "max_gap_merton"));
  const Table one = parse(slurp(dir / "b_50pct.csv"));
  EXPECT_EQ(one.header, (std::vector<std::string>{"s", "pi_exact", "pi_merton", "pi_jump_mean"}));
  EXPECT_EQ(one.rows.size(), 81u);
  const double b = t.num(2, "b");
  const double rev = b / (0.3333 / 24.0);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    if (one.num(i, "s") >= rev) {
      EXPECT_EQ(one.num(i, "pi_exact"), 0.0);
      EXPECT_EQ(one.num(i, "pi_jump_mean"), 0.0);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Simulate, DeterministicAndNonNegative) {
  const std::vector<std::string> args = {"simulate", "--paths", "300", "--seed", "9", "--s", "2"};
  const CliRun a = run(args);
  const CliRun b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Table paths = parse(a.out);
  EXPECT_EQ(paths.header, (std::vector<std::string>{"path_id", "time", "price"}));
  EXPECT_EQ(paths.rows.size(), 300u * 25u);
  for (std::size_t i = 0; i < paths.rows.size(); ++i) EXPECT_GE(paths.num(i, "price"), 0.0);
  const Table summary = parse(a.err);
  ASSERT_EQ(summary.rows.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LT(std::abs(summary.num(i, "empirical_mean") - summary.num(i, "analytic_mean")),
              3.0 * summary.num(i, "mean_se"));
  }
  const CliRun c = run({"simulate", "--paths", "300", "--seed", "10", "--s", "2"});
  EXPECT_NE(a.out, c.out);
}

TEST(Compare, RowsAndOptimality) {
  const CliRun r = run({"compare", "--b-frac", "1.5", "--s", "2", "--paths", "3000", "--table", "--x0", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"strategy", "mean_log_wealth", "std_err", "positivity_violations"}));
  ASSERT_EQ(t.rows.size(), 5u);
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < t.rows.size(); ++i) idx[t.rows[i][0]] = i;
  ASSERT_EQ(idx.size(), 5u);
  EXPECT_EQ(t.num(idx["zero"], "mean_log_wealth"), std::log(2.0));
  EXPECT_EQ(t.num(idx["zero"], "std_err"), 0.0);
  const double ex = t.num(idx["exact"], "mean_log_wealth"), ex_se = t.num(idx["exact"], "std_err");
  for (const char* other : {"merton", "jump_mean", "zero"}) {
    const double o = t.num(idx[other], "mean_log_wealth"), o_se = t.num(idx[other], "std_err");
    EXPECT_GE(ex, o - 3.0 * std::hypot(ex_se, o_se)) << other;
  }
  const double g = t.num(idx["log_x_plus_g"], "mean_log_wealth"), g_se = t.num(idx["log_x_plus_g"], "std_err");
  EXPECT_LT(std::abs(ex - g), 3.0 * std::hypot(ex_se, g_se));
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(t.num(i, "positivity_violations"), 0.0);
}

TEST(Value, CsvColumns) {
  const CliRun r = run({"value", "--s-grid", "1:3:3", "--paths", "200", "--table"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "s", "g_hat", "std_err"}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_GT(t.num(0, "g_hat"), t.num(2, "g_hat"));
}

TEST(Describe, PresetQuantities) {
  const CliRun r = run({"describe-preset"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("preset: benth2012"), std::string::npos);
  EXPECT_NE(r.out.find("drag coefficient eta*mu_F/lambda: 6.7232"), std::string::npos);
  EXPECT_NE(r.out.find("sigma_L^2: 0.09706"), std::string::npos);
  EXPECT_NE(r.out.find("case: B"), std::string::npos);
  EXPECT_NE(r.out.find("merton error bound: inf"), std::string::npos);
  EXPECT_NE(r.out.find("3.72491"), std::string::npos);
  for (const auto& name : preset_names()) EXPECT_EQ(run({"describe-preset", "--preset", name}).code, 0) << name;
}

TEST(ExitCodes, ConfigAndUsageErrors) {
  EXPECT_EQ(run({"solve", "--preset", "nope"}).code, kExitConfig);
  EXPECT_EQ(run({"solve", "--s-grid", "1:2"}).code, kExitConfig);
  EXPECT_EQ(run({"solve", "--pi-max", "-1"}).code, kExitConfig);
  EXPECT_EQ(run({"bogus"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"compare", "--x0", "0"}).code, kExitConfig);
  EXPECT_EQ(run({"solve", "--preset", "gaussian", "--b-frac", "0.5"}).code, kExitConfig);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  const CliRun help = run({"--help"});
  EXPECT_NE(help.out.find("--compensated"), std::string::npos);
  EXPECT_NE(help.out.find("LEVYOU_THREADS"), std::string::npos);
}

TEST(Config, SectionsAndFlagPrecedence) {
  const auto dir = scratch_dir("config");
  const auto ini = dir / "levyou.ini";
  {
    std::ofstream f(ini);
    f << "s = 1\nb_frac = 0.2\n\n[benth2012]\nb_frac = 1.5\n\n[gaussian]\nb = 0.07\n";
  }
  const CliRun a = run({"solve", "--config", ini.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const CliRun direct = run({"solve", "--s", "1", "--b-frac", "1.5"});
  EXPECT_EQ(a.out, direct.out);
  const CliRun b = run({"solve", "--config", ini.string(), "--b-frac", "0.5"});
  EXPECT_EQ(b.out, run({"solve", "--s", "1", "--b-frac", "0.5"}).out);
  const CliRun g = run({"solve", "--config", ini.string(), "--preset", "gaussian"});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_NE(g.out.find("b = 0.070000000000000007"), std::string::npos) << g.out;
  {
    std::ofstream f(ini);
    f << "colour = blue\n";
  }
  EXPECT_EQ(run({"solve", "--config", ini.string()}).code, kExitConfig);
  EXPECT_EQ(run({"solve", "--config", (dir / "missing.ini").string()}).code, kExitConfig);
  std::filesystem::remove_all(dir);
}
