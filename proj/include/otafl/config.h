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

#ifndef OTAFL_CONFIG_H_
#define OTAFL_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "otafl/fedcore.h"
#include "otafl/rngchan.h"

namespace otafl::expcli {

// Every problem found while parsing, one "field.path: message" per entry.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

enum class ModelKind { kLogistic, kQuadratic };
enum class DataSource { kSynthetic, kCsv, kQuadratic };
enum class AttackKind { kNone, kNoisyLabel, kClassFlip };

struct ModelConfig {
  ModelKind kind = ModelKind::kLogistic;
  double l2_reg = 0.0;
};

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::string csv_path;
  int dim = 20;
  int num_classes = 10;
  double separation = 3.0;
  int local_size = 500;  // M
  double dir_alpha = 0.1;
  // Synthetic pool size is pool_factor * N * M.
  int pool_factor = 2;
  int test_size = 1000;
  // Quadratic fixture.
  double lambda = 1.0;
  double L = 1.0;
  double heterogeneity = 0.0;
  double sample_spread = 0.0;
};

enum class ChannelFamily { kRayleigh, kNakagami, kDegenerate };

struct ChannelConfig {
  ChannelFamily family = ChannelFamily::kRayleigh;
  bool unit_mean = true;
  double scale = 1.0;  // Rayleigh sigma
  double m = 2.0;      // Nakagami shape
  double omega = 1.0;  // Nakagami spread
  double value = 1.0;  // degenerate gain

  rngchan::ChannelModel model() const;
};

struct SchemeConfig {
  fedcore::SchemeKind kind = fedcore::SchemeKind::kBlind;
  double p_active = 0.99;  // used when c_th is not set
  double c_th = 0.0;       // 0 derives the cutoff from p_active
  double gamma_t = 1.0;
  double delta_max = 0.0;
};

struct ScheduleConfig {
  fedcore::ScheduleKind kind = fedcore::ScheduleKind::kFixedBlind;
  double eta_0 = 0.03;
  // When positive, eta_0 = inverse_L_fraction / L of the cell's objective.
  double inverse_L_fraction = 0.0;
};

struct SweepConfig {
  std::vector<int> clients = {100};
  std::vector<std::uint64_t> seeds;  // empty: {master_seed}
  std::vector<double> rho = {0.0};
  std::vector<double> noise_levels = {0.0};
};

struct EstimateConfig {
  int probe_weights = 20;
  int probe_rounds = 10;
  double gamma_tol = 1e-9;
  bool mutual_information = false;
  int entry_redraws = 100;
  int d_star = 0;  // 0: min(d, 8)
  int mi_round = 0;
  double C_g = 0.0;
};

struct OutputConfig {
  std::string dir = "out";
  bool emit_svg = false;
};

inline const std::vector<std::string> kOverlayNames = {
    "cvx_fixed_lr", "cvx_decay_lr", "noncvx_fixed_lr", "noncvx_decay_lr",
    "power_control"};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelConfig model;
  DataConfig data;
  ChannelConfig channel;
  double sigma_z_sq = 0.0;
  SchemeConfig scheme;
  int E = 1;
  int B = 50;
  ScheduleConfig schedule;
  int rounds = 200;
  std::uint64_t master_seed = 1;
  double trim_budget = 0.0;  // 0: no trimming
  AttackKind attack = AttackKind::kNone;
  SweepConfig sweep;
  std::vector<std::string> overlays;
  EstimateConfig estimates;
  OutputConfig output;
  int workers = 1;

  std::vector<std::uint64_t> seeds() const;
};

// Strict parsing: unknown keys, duplicate keys, type mismatches and invalid
// field combinations are all reported.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig from_json(const nlohmann::json& node);

// Throws ConfigError listing every violated invariant.
void validate(const ExperimentConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);
// FNV-1a of the canonical JSON form.
std::string config_hash(const ExperimentConfig& config);

}  // namespace otafl::expcli

#endif  // OTAFL_CONFIG_H_
