#include "shiftest/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shiftest;
namespace fs = std::filesystem;

namespace {

const char *kConfig = R"(# comment line
name = demo
eps = 0.5   # trailing comment
delta = sqrt
T = 0.05
domain = 0 1
ladder = 50 100
output_times = 0.025 0.05
fine_mult = 4
piece = -inf 0.5 0 0
piece = 0.5 0.8 -0.5 1
piece = 0.8 inf 0 0
)";

ExperimentConfig parse(const std::string &s) {
  std::istringstream in(s);
  return parse_config(in);
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string &name) {
  const fs::path d = fs::temp_directory_path() / ("shiftest_" + name);
  fs::create_directories(d);
  return d;
}

} // namespace

TEST(Config, ParsesAllKeys) {
  const auto c = parse(kConfig);
  EXPECT_EQ(c.name, "demo");
  EXPECT_EQ(c.delta, 0.0);
  EXPECT_EQ(c.T, 0.05);
  EXPECT_EQ(c.ladder, (std::vector<std::size_t>{50, 100}));
  EXPECT_EQ(c.output_times.size(), 2u);
  EXPECT_EQ(c.fine_mult, 4u);
  ASSERT_EQ(c.segments.size(), 3u);
  EXPECT_TRUE(std::isinf(c.segments[0].a));
  EXPECT_EQ(c.segments[1].a, 0.5);
  const auto rc = rung_config(c, 100);
  EXPECT_EQ(rc.cells, 100u);
  EXPECT_EQ(rc.T, 0.05);
}

TEST(Config, RejectsMalformedInput) {
  std::string base = kConfig;
  EXPECT_THROW(parse(base + "colour = red\n"), ConfigError);
  EXPECT_THROW(parse(base + "ladder = 100 50\n"), ConfigError);
  EXPECT_THROW(parse(base + "T = abc\n"), ConfigError);
  EXPECT_THROW(parse(base + "piece = 0 1 2\n"), ConfigError);
  EXPECT_THROW(parse(base + "fine_mult = 2\n"), ConfigError);
  EXPECT_THROW(parse(base + "just words\n"), ConfigError);
  EXPECT_THROW(parse(base + "output_times = 1.0\n"), ConfigError);
  EXPECT_THROW(parse(base + "model = euler\n"), ConfigError);
  EXPECT_THROW(parse("T = 0.1\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
  EXPECT_EQ(config_hash("abc"), config_hash("abc"));
  EXPECT_NE(config_hash("abc"), config_hash("abd"));
  EXPECT_EQ(config_hash("").size(), 16u);
  EXPECT_EQ(config_hash(""), "cbf29ce484222325");
}

TEST(Harness, LadderTablesAndFiles) {
  const auto c = parse(kConfig);
  std::vector<std::size_t> seen;
  ExperimentOptions opt;
  opt.with_fine = true;
  opt.on_rung = [&](const RungResult &r) { seen.push_back(r.report.cells); };
  const auto res = run_experiment(c, opt);
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(seen, (std::vector<std::size_t>{50, 100}));

  std::vector<RungSummary> rungs;
  for (const auto &r : res)
    rungs.push_back(summarize(r));
  EXPECT_TRUE(std::isnan(rungs[0].upsilon));
  EXPECT_GT(rungs[1].fine_l1, 0);
  EXPECT_GE(rungs[1].l1, rungs[1].fine_l1);

  const auto t = bounds_table(rungs);
  ASSERT_EQ(t.columns.size(), 4u);
  EXPECT_TRUE(std::isnan(t.column("l2").eoc[0]));
  EXPECT_FALSE(std::isnan(t.column("l2").eoc[1]));
  EXPECT_THROW(t.column("nope"), std::out_of_range);

  const fs::path d = scratch("ladder");
  write_csv(t, (d / "bounds.csv").string());
  const std::string csv = slurp(d / "bounds.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "cells,h,max_delta,eoc_max_delta,l2,eoc_l2,l1,eoc_l1,fine_l1,eoc_fine_l1");
  EXPECT_NE(csv.find("\n50,0.02,"), std::string::npos);

  write_report(c, rungs, (d / "report.json").string());
  const auto back = read_report((d / "report.json").string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].cells, 100u);
  EXPECT_EQ(back[1].l2, rungs[1].l2); // full precision
  EXPECT_TRUE(std::isnan(back[0].upsilon));

  write_manifest(c, rungs, "ok", "", (d / "manifest.json").string());
  const std::string m = slurp(d / "manifest.json");
  EXPECT_NE(m.find(config_hash(c.text)), std::string::npos);
  EXPECT_NE(m.find("\"status\": \"ok\""), std::string::npos);
}

TEST(Harness, ManifestWithoutRungs) {
  const auto c = parse(kConfig);
  const fs::path d = scratch("empty");
  write_manifest(c, {}, "aborted", "rung 50 cells: boom", (d / "manifest.json").string());
  const std::string m = slurp(d / "manifest.json");
  EXPECT_NE(m.find("\"completed_rungs\": []"), std::string::npos);
  EXPECT_NE(m.find("boom"), std::string::npos);
}

TEST(Harness, SnapshotAndCurveFiles) {
  auto c = parse(kConfig);
  std::vector<GluedSnapshot> snaps;
  RunHooks hooks;
  hooks.on_output = [&](const GluedSnapshot &s) { snaps.push_back(s); };
  const RunReport r = run_rung(rung_config(c, 50), hooks);
  ASSERT_EQ(snaps.size(), 2u);
  const fs::path d = scratch("snap");
  write_snapshot(snaps[1], 0, 1, 11, (d / "s.dat").string());
  std::ifstream in(d / "s.dat");
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    rows += !line.empty() && line[0] != '#';
  EXPECT_EQ(rows, 11);
  EXPECT_THROW(write_snapshot(snaps[1], 1, 0, 11, (d / "x.dat").string()),
               std::invalid_argument);
  write_curves(r, (d / "c.dat").string());
  std::ifstream cin(d / "c.dat");
  std::size_t lines = 0;
  while (std::getline(cin, line))
    lines += !line.empty() && line[0] != '#';
  EXPECT_EQ(lines, r.rows.size() * r.curves.size());
  EXPECT_EQ(r.curves.size(), 1u);
  EXPECT_THROW(write_csv(bounds_table({}), "/nonexistent/dir/x.csv"), std::runtime_error);
}
