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

#ifndef OTAFL_EXPERIMENT_H_
#define OTAFL_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "otafl/bounds.h"
#include "otafl/config.h"
#include "otafl/datamod.h"
#include "otafl/fedcore.h"
#include "otafl/metrics.h"
#include "otafl/models.h"

namespace otafl::expcli {

// One point of the sweep grid.
struct CellKey {
  int N = 1;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double noise_level = 0.0;

  // File-name-safe identifier, e.g. "N100_s1_rho0_nl0".
  std::string id() const;
};

// Grid order: clients, then seeds, then rho, then noise levels.
std::vector<CellKey> sweep_cells(const ExperimentConfig& config);

struct CellSetup {
  bool quadratic = false;
  models::ModelSpec spec;  // logistic only
  std::vector<models::ObjectivePtr> clients;
  std::shared_ptr<const datamod::Dataset> train;
  std::shared_ptr<const datamod::Dataset> test;  // may be empty
  int param_dim = 0;
  int malicious = 0;
  int substituted = 0;  // Dirichlet refills summed over clients
  models::Curvature curvature;
};

CellSetup build_cell(const ExperimentConfig& config, const CellKey& key);

// eta_0 after resolving schedule.inverse_L_fraction against L.
double resolved_eta_0(const ExperimentConfig& config, double L);

fedcore::TrainingConfig training_config(const ExperimentConfig& config,
                                        const CellSetup& setup, const CellKey& key);

struct ConstantsFile {
  bounds::ConvergenceInputs inputs;
  metrics::ConstantEstimates estimates;
  std::vector<std::string> overlays;
};

nlohmann::json constants_to_json(const ConstantsFile& file);
ConstantsFile constants_from_json(const nlohmann::json& node);
ConstantsFile read_constants(const std::string& path);

// Bound value of `overlay` at round row t. Convex overlays bound
// E||w_t - w*||^2; the others bound their averaged or minimum gradient
// measure over the first T = t + 1 rounds. NaN where undefined (T < 2 for
// the decaying non-convex bound).
double overlay_value(const std::string& overlay, const bounds::ConvergenceInputs& in, int t);

// CSV with a `t` column and one column per overlay for rows 0..rounds-1.
std::string bound_curves_csv(const ConstantsFile& file, int rounds);

struct CellResult {
  CellKey key;
  bool ok = false;
  std::string error;
  std::string csv_path;
  std::string constants_path;
  double final_loss = 0.0;
  double final_grad_norm_sq = 0.0;
  double mean_discrepancy = 0.0;
  double final_accuracy = 0.0;  // NaN for quadratic models
  double final_dist_sq = 0.0;   // NaN when w* is not computed
  double R_T = 0.0;
  double dropout_fraction = 0.0;
  int empty_rounds = 0;
  double mi_bound = 0.0;        // NaN unless requested
  double Gamma_hat = 0.0;       // NaN unless computed
  double L = 0.0;
  double lambda = 0.0;
};

struct RunOptions {
  // Run only the cell with this id; the summary and manifest are left
  // untouched.
  std::string only_cell;
};

struct RunOutput {
  std::vector<CellResult> cells;
  std::string summary_path;
  std::string manifest_path;
  std::string summary_hash;
  int failures = 0;
};

// Executes one cell and writes its CSV and constants file under
// config.output.dir. Failures are captured in the result.
CellResult run_cell(const ExperimentConfig& config, const CellKey& key);

RunOutput run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Least-squares slope of log(y) against log(x); NaN with fewer than two
// distinct x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Baseline system (N=100, B=50, eta=0.03, Dir(0.1)) plus one preset per
// acceptance study.
ExperimentConfig baseline_preset();
std::vector<std::pair<std::string, ExperimentConfig>> presets();

// Reads the "config" object of a manifest written by run_experiment.
ExperimentConfig config_from_manifest(const std::string& path);

}  // namespace otafl::expcli

#endif  // OTAFL_EXPERIMENT_H_
