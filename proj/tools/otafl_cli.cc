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

// Command-line front end: run sweeps, evaluate bound curves, emit presets.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "otafl/config.h"
#include "otafl/experiment.h"
#include "otafl/svg.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

using namespace otafl::expcli;

int cmd_run(const std::string& path, bool from_manifest, const std::string& cell,
            const std::string& out_dir) {
  ExperimentConfig config = from_manifest ? config_from_manifest(path) : parse_config(path);
  if (!out_dir.empty()) config.output.dir = out_dir;
  RunOptions options;
  options.only_cell = cell;
  const RunOutput out = run_experiment(config, options);
  for (const auto& c : out.cells) {
    if (c.ok) {
      std::printf("cell %s ok -> %s\n", c.key.id().c_str(), c.csv_path.c_str());
    } else {
      std::printf("cell %s FAILED: %s\n", c.key.id().c_str(), c.error.c_str());
    }
  }
  if (!out.summary_path.empty()) {
    std::printf("summary %s (fnv1a %s)\nmanifest %s\n", out.summary_path.c_str(),
                out.summary_hash.c_str(), out.manifest_path.c_str());
  }
  return out.failures > 0 ? kExitRuntime : 0;
}

int cmd_bounds(const std::string& path, int rounds, const std::string& out,
               const std::vector<std::string>& overlays) {
  ConstantsFile file = read_constants(path);
  if (!overlays.empty()) file.overlays = overlays;
  if (file.overlays.empty()) {
    throw ConfigError({"overlays: constants file lists none; pass --overlay"});
  }
  const std::string csv = bound_curves_csv(file, rounds);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file_atomic(out, csv);
  }
  return 0;
}

int cmd_presets(const std::string& out_dir) {
  for (const auto& [name, config] : presets()) {
    const std::string path = (std::filesystem::path(out_dir) / (name + ".json")).string();
    write_file_atomic(path, to_json(config).dump(2) + "\n");
    std::printf("%s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Over-the-air federated learning simulator"};
  app.require_subcommand(1);

  std::string run_path, run_cell, run_out;
  bool from_manifest = false;
  auto* run = app.add_subcommand("run", "Run the sweep described by a config file");
  run->add_option("config", run_path, "Experiment config (JSON)")->required();
  run->add_flag("--manifest", from_manifest, "Treat the path as a manifest and re-run its config");
  run->add_option("--cell", run_cell, "Re-run a single cell by id");
  run->add_option("--out", run_out, "Override output.dir");

  std::string constants_path, bounds_out;
  int rounds = 100;
  std::vector<std::string> overlays;
  auto* bnd = app.add_subcommand("bounds", "Evaluate bound curves from a constants file");
  bnd->add_option("constants", constants_path, "Constants file written by run")->required();
  bnd->add_option("--rounds", rounds, "Number of rounds")->check(CLI::PositiveNumber);
  bnd->add_option("--out", bounds_out, "Output CSV (stdout when omitted)");
  bnd->add_option("--overlay", overlays, "Overlay names (default: those in the file)");

  std::string presets_out = "presets";
  auto* pre = app.add_subcommand("presets", "Write the built-in preset configs");
  pre->add_option("--out", presets_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return cmd_run(run_path, from_manifest, run_cell, run_out);
    if (*bnd) return cmd_bounds(constants_path, rounds, bounds_out, overlays);
    if (*pre) return cmd_presets(presets_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error:\n%s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
