// Copyright 2026 The OTAFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "otafl/config.h"
#include "otafl/experiment.h"
#include "otafl/svg.h"

namespace otafl::expcli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("otafl_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str(const std::string& leaf = "") const { return (path_ / leaf).string(); }

 private:
  fs::path path_;
};

const char* kSmallLogistic = R"({
  "name": "small",
  "model": {"kind": "logistic", "l2_reg": 0.01},
  "data": {"source": "synthetic", "dim": 5, "num_classes": 3, "local_size": 20,
           "dir_alpha": 0.5, "test_size": 100},
  "channel": {"family": "rayleigh"},
  "sigma_z_sq": 0.01,
  "scheme": {"kind": "blind"},
  "local": {"E": 2, "B": 5},
  "schedule": {"kind": "fixed_blind", "eta_0": 0.05},
  "rounds": 12,
  "master_seed": 3,
  "sweep": {"clients": [10, 100]}
})";

ExperimentConfig small_config(const TempDir& dir, const std::string& sub = "out") {
  ExperimentConfig c = parse_config_text(kSmallLogistic);
  c.output.dir = dir.str(sub);
  return c;
}

// Quadratic cells with a step far beyond 2/L overflow within a few dozen rounds.
ExperimentConfig diverging_config(const TempDir& dir, const std::string& sub) {
  ExperimentConfig c = small_config(dir, sub);
  c.model.kind = ModelKind::kQuadratic;
  c.data.source = DataSource::kQuadratic;
  c.data.dim = 3;
  c.data.sample_spread = 0.1;
  c.schedule.eta_0 = 1e10;
  c.rounds = 60;
  validate(c);
  return c;
}

std::vector<std::string> issues_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& items, const std::string& needle) {
  for (const auto& s : items)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

TEST(ConfigTest, DefaultPresetMatchesSystemConfiguration) {
  const ExperimentConfig c = parse_config_text(to_json(baseline_preset()).dump());
  EXPECT_EQ(c.sweep.clients, std::vector<int>{100});
  EXPECT_EQ(c.B, 50);
  EXPECT_EQ(c.schedule.eta_0, 0.03);
  EXPECT_EQ(c.data.dir_alpha, 0.1);
  EXPECT_EQ(config_hash(c), config_hash(baseline_preset()));
  bool listed = false;
  for (const auto& [name, preset] : presets()) {
    listed |= name == "baseline";
    EXPECT_NO_THROW(validate(preset)) << name;
    EXPECT_EQ(config_hash(parse_config_text(to_json(preset).dump())), config_hash(preset)) << name;
  }
  EXPECT_TRUE(listed);
}

TEST(ConfigTest, BatchLargerThanLocalSizeNamesBothFields) {
  const auto issues = issues_of(R"({"data": {"local_size": 20}, "local": {"B": 21}})");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_NE(issues[0].find("local.B"), std::string::npos);
  EXPECT_NE(issues[0].find("data.local_size"), std::string::npos);
}

TEST(ConfigTest, DuplicateKeyRejected) {
  const auto issues = issues_of(R"({"rounds": 5, "local": {"E": 1, "E": 2}})");
  EXPECT_TRUE(any_contains(issues, "local.E: duplicate key")) << ::testing::PrintToString(issues);
}

TEST(ConfigTest, UnknownKeysRejectedWithPath) {
  const auto issues = issues_of(R"({"rounds": 5, "chanel": {}, "data": {"dirichlet": 1}})");
  EXPECT_TRUE(any_contains(issues, "chanel: unknown key"));
  EXPECT_TRUE(any_contains(issues, "data.dirichlet: unknown key"));
}

TEST(ConfigTest, ReportsEveryViolation) {
  const auto issues = issues_of(
      R"({"rounds": 0, "local": {"E": 0}, "channel": {"family": "rician"}, "sigma_z_sq": -1})");
  EXPECT_TRUE(any_contains(issues, "rounds:"));
  EXPECT_TRUE(any_contains(issues, "local.E:"));
  EXPECT_TRUE(any_contains(issues, "channel.family:"));
  EXPECT_TRUE(any_contains(issues, "sigma_z_sq:"));
}

TEST(ConfigTest, OverlayPreconditions) {
  const auto issues = issues_of(R"({"overlays": ["noncvx_fixed_lr", "bogus"]})");
  EXPECT_TRUE(any_contains(issues, "overlays"));
  EXPECT_GE(issues.size(), 2u);
}

TEST(ConfigTest, MalformedJsonAndMissingFile) {
  EXPECT_THROW(parse_config_text("{\"rounds\": "), ConfigError);
  EXPECT_THROW(parse_config("/nonexistent/otafl.json"), ConfigError);
}

TEST(SweepTest, GridOrderAndIds) {
  ExperimentConfig c;
  c.sweep.clients = {10, 20};
  c.sweep.seeds = {1, 2};
  c.sweep.rho = {0.0, 0.3};
  c.attack = AttackKind::kClassFlip;
  const auto cells = sweep_cells(c);
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells.front().id(), "N10_s1_rho0_nl0");
  EXPECT_EQ(cells[1].id(), "N10_s1_rho0.3_nl0");
  EXPECT_EQ(cells.back().id(), "N20_s2_rho0.3_nl0");
}

TEST(LogLogSlopeTest, Examples) {
  EXPECT_NEAR(loglog_slope({1, 10, 100}, {1, std::pow(10, -0.5), 0.1}), -0.5, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_slope({5, 5}, {1, 2})));
}

TEST(RunExperimentTest, TwoCellsAndSummary) {
  TempDir dir("two_cells");
  const ExperimentConfig c = small_config(dir);
  const RunOutput out = run_experiment(c);
  ASSERT_EQ(out.cells.size(), 2u);
  EXPECT_EQ(out.failures, 0);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(dir.path() / "out" / "cells")) {
    csvs += e.path().extension() == ".csv";
  }
  EXPECT_EQ(csvs, 2);
  const CsvTable summary = read_csv(out.summary_path);
  EXPECT_EQ(summary.rows.size(), 2u);
  EXPECT_EQ(summary.rows[0][summary.column_index("status")], "ok");
  const CsvTable cell = read_csv(out.cells[0].csv_path);
  EXPECT_EQ(cell.rows.size(), 12u);
  const std::vector<std::string> head = {"t", "loss", "grad_norm_sq", "discrepancy",
                                         "participants", "eta_t"};
  EXPECT_EQ(std::vector<std::string>(cell.header.begin(), cell.header.begin() + 6), head);
  EXPECT_EQ(cell.column("participants").front(), 10.0);
  EXPECT_TRUE(fs::exists(out.manifest_path));
  EXPECT_TRUE(fs::exists(out.cells[1].constants_path));
}

TEST(RunExperimentTest, RerunIsByteIdenticalAndWorkerInvariant) {
  TempDir dir("rerun");
  ExperimentConfig c = small_config(dir, "a");
  const RunOutput a = run_experiment(c);
  const RunOutput b = run_experiment(c);
  EXPECT_EQ(a.summary_hash, b.summary_hash);
  c.workers = 3;
  c.output.dir = dir.str("c");
  const RunOutput w = run_experiment(c);
  EXPECT_EQ(slurp(a.summary_path), slurp(w.summary_path));
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(slurp(a.cells[i].csv_path), slurp(w.cells[i].csv_path));
  }
}

TEST(RunExperimentTest, SingleCellRegeneratesDeletedOutput) {
  TempDir dir("isolation");
  const ExperimentConfig c = small_config(dir);
  const RunOutput full = run_experiment(c);
  const std::string path = full.cells[1].csv_path;
  const std::string before = slurp(path);
  const std::string summary = slurp(full.summary_path);
  fs::remove(path);
  RunOptions only;
  only.only_cell = full.cells[1].key.id();
  const RunOutput one = run_experiment(c, only);
  ASSERT_EQ(one.cells.size(), 1u);
  EXPECT_EQ(slurp(path), before);
  EXPECT_EQ(slurp(full.summary_path), summary);
  only.only_cell = "N7_s1_rho0_nl0";
  EXPECT_THROW(run_experiment(c, only), ConfigError);
}

TEST(RunExperimentTest, ManifestReproducesConfig) {
  TempDir dir("manifest");
  const ExperimentConfig c = small_config(dir);
  const RunOutput out = run_experiment(c);
  const ExperimentConfig back = config_from_manifest(out.manifest_path);
  EXPECT_EQ(config_hash(back), config_hash(c));
  std::string text = slurp(out.manifest_path);
  const auto pos = text.find("\"rounds\": 12");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"rounds\": 13");
  spit(dir.path() / "tampered.json", text);
  EXPECT_THROW(config_from_manifest(dir.str("tampered.json")), ConfigError);
}

TEST(RunExperimentTest, FailedCellIsRecordedAndSweepContinues) {
  TempDir dir("failure");
  const ExperimentConfig c = diverging_config(dir, "out");
  const RunOutput out = run_experiment(c);
  EXPECT_EQ(out.failures, 2);
  ASSERT_EQ(out.cells.size(), 2u);
  EXPECT_FALSE(out.cells[0].error.empty());
  const CsvTable summary = read_csv(out.summary_path);
  EXPECT_EQ(summary.rows[1][summary.column_index("status")], "failed");
}

TEST(RunExperimentTest, HardeningPresetReportsSlope) {
  ExperimentConfig c;
  for (const auto& [name, preset] : presets())
    if (name == "hardening") c = preset;
  ASSERT_EQ(c.name, "hardening");
  c.rounds = 10;
  c.sweep.seeds = {1};
  c.sweep.clients = {10, 20, 50};
  TempDir dir("hardening");
  c.output.dir = dir.str();
  const RunOutput out = run_experiment(c);
  const CsvTable summary = read_csv(out.summary_path);
  const auto slope = summary.column("loglog_slope_discrepancy");
  ASSERT_EQ(slope.size(), 3u);
  EXPECT_TRUE(std::isfinite(slope[0]));
  EXPECT_LT(slope[0], 0.0);
  EXPECT_EQ(slope[0], slope[2]);
}

TEST(ConstantsTest, RoundTripAndBoundCurves) {
  ConstantsFile f;
  f.inputs.L = 2;
  f.inputs.lambda = 0.5;
  f.inputs.eta_l = 0.5;
  f.inputs.N = 3;
  f.inputs.E = 2;
  f.inputs.d = 4;
  f.inputs.sigma_z_sq = 0.1;
  f.inputs.sigma_s_sq = {0.1, 0.2, 0.3};
  f.inputs.G_sq = {1, 2, 3};
  f.inputs.initial_gap = 1.5;
  f.inputs.eta_0 = 0.1;
  f.estimates.provenance = {"unit test"};
  f.overlays = {"noncvx_fixed_lr", "noncvx_decay_lr"};
  const ConstantsFile back = constants_from_json(constants_to_json(f));
  EXPECT_EQ(constants_to_json(back).dump(), constants_to_json(f).dump());
  EXPECT_TRUE(std::isnan(overlay_value("noncvx_decay_lr", f.inputs, 0)));
  EXPECT_EQ(overlay_value("noncvx_fixed_lr", f.inputs, 4), bounds::noncvx_fixed_lr_bound(f.inputs, 5));
  const CsvTable curves = parse_csv(bound_curves_csv(f, 6));
  EXPECT_EQ(curves.rows.size(), 6u);
  EXPECT_EQ(curves.header, (std::vector<std::string>{"t", "bound_noncvx_fixed_lr",
                                                     "bound_noncvx_decay_lr"}));
}

std::vector<double> polyline_ys(const std::string& svg) {
  const auto start = svg.find("points=\"");
  std::vector<double> ys;
  if (start == std::string::npos) return ys;
  std::istringstream in(svg.substr(start + 8, svg.find('"', start + 8) - start - 8));
  std::string pair;
  while (in >> pair) ys.push_back(std::stod(pair.substr(pair.find(',') + 1)));
  return ys;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

TEST(SvgTest, TwoSeriesGiveTwoPolylines) {
  const CsvTable t = parse_csv("x,a,b\n1,2,3\n2,3,1\n3,5,0.5\n");
  const std::string svg = render_svg(t, {"demo", "x", {"a", "b"}});
  EXPECT_EQ(count_of(svg, "<polyline"), 2u);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

TEST(SvgTest, EmptyCsvWritesNothing) {
  TempDir dir("svg_empty");
  spit(dir.path() / "empty.csv", "x,a\n");
  EXPECT_THROW(emit_svg(dir.str("empty.csv"), {"e", "x", {"a"}}, dir.str("e.svg")), ChartError);
  EXPECT_FALSE(fs::exists(dir.path() / "e.svg"));
}

TEST(SvgTest, MissingColumnIsNamed) {
  TempDir dir("svg_missing");
  spit(dir.path() / "t.csv", "x,a\n1,2\n");
  try {
    emit_svg(dir.str("t.csv"), {"m", "x", {"loss"}}, dir.str("m.svg"));
    FAIL();
  } catch (const ChartError& e) {
    EXPECT_NE(std::string(e.what()).find("'loss'"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir.path() / "m.svg"));
}

TEST(SvgTest, MiBoundLogXChartIsMonotone) {
  std::string csv = "N,mi\n";
  for (int n : {2, 5, 10, 20, 50, 100, 200, 500}) {
    csv += std::to_string(n) + "," + std::to_string(bounds::mi_bound_iid_noiseless(0, 4, n)) + "\n";
  }
  const std::string svg = render_svg(parse_csv(csv), {"mi", "N", {"mi"}, true, false});
  const auto ys = polyline_ys(svg);
  ASSERT_EQ(ys.size(), 8u);
  // Screen y grows downwards, so a decreasing value has increasing y.
  for (std::size_t i = 1; i < ys.size(); ++i) EXPECT_GT(ys[i], ys[i - 1]);
}

TEST(SvgTest, EmittedWithCellOutputs) {
  TempDir dir("svg_cells");
  ExperimentConfig c = small_config(dir);
  c.output.emit_svg = true;
  const RunOutput out = run_experiment(c);
  int svgs = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) svgs += e.path().extension() == ".svg";
  EXPECT_GE(svgs, 2);
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "summary_discrepancy.svg"));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OTAFL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  TempDir dir("cli");
  spit(dir.path() / "ok.json", kSmallLogistic);
  EXPECT_EQ(run_cli("run " + dir.str("ok.json") + " --out " + dir.str("ok")), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "ok" / "summary.csv"));
  EXPECT_EQ(run_cli("run " + dir.str("ok") + "/manifest.json --manifest --out " + dir.str("m")), 0);
  EXPECT_EQ(slurp(dir.path() / "ok" / "summary.csv"), slurp(dir.path() / "m" / "summary.csv"));

  spit(dir.path() / "bad.json", R"({"local": {"B": 1000}})");
  EXPECT_EQ(run_cli("run " + dir.str("bad.json")), 1);
  EXPECT_EQ(run_cli("run " + dir.str("missing.json")), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);

  const ExperimentConfig diverge = diverging_config(dir, "div");
  spit(dir.path() / "div.json", to_json(diverge).dump());
  EXPECT_EQ(run_cli("run " + dir.str("div.json")), 2);

  EXPECT_EQ(run_cli("presets --out " + dir.str("presets")), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "presets" / "baseline.json"));
  EXPECT_EQ(run_cli("run " + dir.str("presets") + "/baseline.json --cell nope"), 1);

  ASSERT_TRUE(fs::exists(dir.path() / "ok" / "constants" / "N10_s3_rho0_nl0.json"));
  ConstantsFile f;
  f.inputs.L = 4;
  f.inputs.eta_l = 0.25;
  f.inputs.initial_gap = 1;
  spit(dir.path() / "constants.json", constants_to_json(f).dump());
  const std::string constants = dir.str("constants.json");
  EXPECT_EQ(run_cli("bounds " + constants + " --rounds 5 --overlay noncvx_fixed_lr --out " +
                    dir.str("b.csv")),
            0);
  EXPECT_EQ(read_csv(dir.str("b.csv")).rows.size(), 5u);
  f.inputs.eta_l = 0.2;
  spit(dir.path() / "bad_rate.json", constants_to_json(f).dump());
  EXPECT_EQ(run_cli("bounds " + dir.str("bad_rate.json") + " --overlay noncvx_fixed_lr"), 1);
  EXPECT_EQ(run_cli("bounds " + constants + " --rounds 5"), 1);
}

}  // namespace
}  // namespace otafl::expcli
