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

#ifndef OTAFL_METRICS_H_
#define OTAFL_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "otafl/fedcore.h"
#include "otafl/models.h"
#include "otafl/rngchan.h"
#include "otafl/types.h"

// Empirical estimators for everything the bound evaluators consume.
namespace otafl::metrics {

// ||(1/N) sum_n c_n grad_n - (1/N) sum_n mu_c grad_n||.
double hardening_discrepancy(std::span<const GradientVector> grads,
                             std::span<const double> fading, double mu_c);

struct GammaEstimate {
  double gamma = 0.0;  // clamped at 0
  double raw = 0.0;    // before clamping
  bool clamped = false;
  Vector w_star;
  double f_star = 0.0;
  std::vector<double> local_minima;  // f_n*
};

// Gamma = f(w*) - (1/N) sum_n f_n*. Raw values below -10 tol are reported as
// clamped.
GammaEstimate estimate_gamma(std::span<const models::ObjectivePtr> clients, double tol);

inline constexpr int kSigmaResamples = 200;
inline constexpr int kMinSigmaProbes = 20;

// max over probes of B * E||grad(w; batch) - grad(w)||^2, with batches of
// size B drawn without replacement (the sampling used during training).
double estimate_sigma_s(const models::Objective& objective,
                        std::span<const Vector> probe_weights, int B,
                        rngchan::RandomStream& stream,
                        int resamples = kSigmaResamples);

inline constexpr double kGSafetyFactor = 1.2;
inline constexpr int kMinGProbeRounds = 10;

// 1.2 * max over probes of the mean ||accumulated upload||^2 over
// `probe_rounds` local updates.
double estimate_G(const models::Objective& objective, const fedcore::LocalConfig& cfg,
                  std::span<const Vector> probe_weights, int probe_rounds,
                  const fedcore::TrimPolicy& trim, rngchan::RandomStream& stream);

// Entry-wise multiplication by i.i.d. Rademacher signs. The stream is taken
// by value so reusing it reproduces the same signs.
GradientVector signflip_preprocess(const GradientVector& g,
                                   rngchan::RandomStream sign_stream);

struct ProbeConfig {
  int redraws = 100;
  int d_star = 0;  // 0 selects min(d, 8)
  int workers = 1;
};

struct EntryVariances {
  Matrix variances;           // N x d*
  std::vector<int> selected;  // coordinates kept, ascending
  std::string selection_rule;
  int redraws = 0;
};

// Per-client, per-entry variances of S (c_n * upload_n) at fixed w_t over
// Monte-Carlo redraws of fading and batch order. S is the round's sign
// matrix, shared by all clients and redraws. The d* coordinates with the
// largest client-summed variance are kept.
EntryVariances entry_variance_probe(std::span<const models::ObjectivePtr> clients,
                                    const Vector& w_t, const fedcore::LocalConfig& cfg,
                                    const rngchan::ChannelModel& channel,
                                    const fedcore::TrimPolicy& trim,
                                    std::uint64_t master_seed, int round,
                                    const ProbeConfig& probe);
// Probes at a recorded round: uses its w_t and eta_l.
EntryVariances entry_variance_probe(std::span<const models::ObjectivePtr> clients,
                                    const fedcore::RoundRecord& record, int E, int B,
                                    const rngchan::ChannelModel& channel,
                                    std::uint64_t master_seed, const ProbeConfig& probe);

// (1/T) sum_{t<T} ||grad f(w_t)||^2 over recorded snapshots.
double convergence_R(std::span<const fedcore::RoundRecord> records,
                     const models::Objective& global, int T);

// min_{t<T} ||grad f(w_t)||^2.
double min_grad_norm_sq(std::span<const fedcore::RoundRecord> records,
                        const models::Objective& global, int T);

struct ConstantEstimates {
  double L = 0.0;
  double lambda = 0.0;
  double Gamma_hat = 0.0;
  std::vector<double> sigma_s_sq_hat;
  std::vector<double> G_sq_hat;
  Matrix entry_vars;
  std::vector<int> entry_selection;
  std::vector<std::string> provenance;
};

}  // namespace otafl::metrics

#endif  // OTAFL_METRICS_H_
