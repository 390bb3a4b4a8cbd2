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

#ifndef OTAFL_FEDCORE_H_
#define OTAFL_FEDCORE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otafl/models.h"
#include "otafl/rngchan.h"
#include "otafl/types.h"

// Federated round engine: local SGD, trimming, over-the-air aggregation and
// the server update.
namespace otafl::fedcore {

struct LocalConfig {
  int E = 1;           // local steps per round
  int B = 1;           // mini-batch size
  double eta_l = 0.1;  // local step size
};

enum class SchemeKind { kBlind, kTruncatedInversion };

class AggregationScheme {
 public:
  static AggregationScheme blind();
  // Requires c_th > 0, gamma_t > 0 and 0 <= delta_max < c_th.
  static AggregationScheme truncated_inversion(double c_th, double gamma_t,
                                               double delta_max);

  SchemeKind kind() const { return kind_; }
  double c_th() const { return c_th_; }
  double gamma_t() const { return gamma_t_; }
  double delta_max() const { return delta_max_; }

 private:
  SchemeKind kind_ = SchemeKind::kBlind;
  double c_th_ = 0.0;
  double gamma_t_ = 1.0;
  double delta_max_ = 0.0;
};

enum class TrimMode { kNone, kNormClip };

class TrimPolicy {
 public:
  static TrimPolicy none() { return TrimPolicy(); }
  // Throws unless budget > 0.
  static TrimPolicy norm_clip(double budget);

  TrimMode mode() const { return mode_; }
  double budget() const { return budget_; }

 private:
  TrimMode mode_ = TrimMode::kNone;
  double budget_ = 0.0;
};

struct LocalUpdate {
  GradientVector accumulated;  // sum of the E mini-batch gradients
  Vector final_weights;        // w^(E)
};

// E SGD steps from w_t over batches of a shuffled shard; the shard is
// re-shuffled each time the floor(M / B) batches are used up.
LocalUpdate local_update(const models::Objective& objective, const Vector& w_t,
                         const LocalConfig& cfg, rngchan::RandomStream& shuffle);

GradientVector trim(const GradientVector& g, const TrimPolicy& policy);

// g_t = (1/N)(sum_n c_n grad_n + xi), reduced in ascending client order.
GradientVector aggregate_blind(std::span<const GradientVector> grads,
                               std::span<const double> fading,
                               const GradientVector& noise);

// Uniform on [-delta_max, delta_max].
double sample_csi_error(rngchan::RandomStream& stream, double delta_max);

struct PowerControlResult {
  GradientVector g;
  std::vector<int> participants;  // S_t, ascending
  bool empty = false;             // S_t was empty; g is zero
};

// Truncated channel inversion with estimated gains c + delta.
PowerControlResult aggregate_power_control(std::span<const GradientVector> grads,
                                           std::span<const double> true_fading,
                                           std::span<const double> csi_errors,
                                           const AggregationScheme& scheme,
                                           const GradientVector& noise);

enum class ScheduleKind { kFixedBlind, kDecayBlind, kFixedInversion };

struct LearningRates {
  double eta_t = 0.0;  // global
  double eta_l = 0.0;  // local
};

// FixedBlind: eta_l = eta_0, eta_t = eta_l / mu_c.
// DecayBlind: eta_t = eta_0 / (1 + t), eta_l = mu_c eta_t.
// FixedInversion: eta_t = eta_l = eta_0.
LearningRates lr_schedule(ScheduleKind kind, double eta_0, double mu_c, int t);

Vector server_step(const Vector& w_t, const GradientVector& g_t, double eta_t);

struct TrainingConfig {
  std::vector<models::ObjectivePtr> clients;
  Vector w0;
  rngchan::ChannelModel channel = rngchan::ChannelModel::rayleigh_unit_mean();
  double sigma_z_sq = 0.0;
  AggregationScheme scheme = AggregationScheme::blind();
  int E = 1;
  int B = 1;
  ScheduleKind schedule = ScheduleKind::kFixedBlind;
  double eta_0 = 0.1;
  int rounds = 0;
  std::uint64_t master_seed = 0;
  TrimPolicy trim = TrimPolicy::none();
  int workers = 1;
  // Keep each client's uploaded gradient in the record.
  bool keep_client_grads = false;
  // Evaluate the global loss and squared gradient norm at every w_t.
  bool track_global = true;
};

struct RoundRecord {
  int t = 0;
  Vector w;             // w_t, before the update
  GradientVector g;     // aggregated gradient
  std::vector<int> participants;
  std::vector<double> fading;
  std::vector<double> csi_errors;  // truncated inversion only
  std::vector<GradientVector> client_grads;
  bool empty_round = false;
  double discrepancy = 0.0;  // ||(1/N) sum (c_n - mu_c) grad_n||
  double loss = 0.0;
  double grad_norm_sq = 0.0;
  double eta_t = 0.0;
  double eta_l = 0.0;
};

struct TrainingRun {
  std::vector<RoundRecord> records;
  Vector final_weights;
};

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(int round)
      : std::runtime_error("non-finite parameters after round " + std::to_string(round)),
        round_(round) {}
  int round() const { return round_; }

 private:
  int round_;
};

TrainingRun run_training(const TrainingConfig& config);

}  // namespace otafl::fedcore

#endif  // OTAFL_FEDCORE_H_
