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

#include "otafl/fedcore.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "otafl/metrics.h"
#include "otafl/parallel.h"

namespace otafl::fedcore {
namespace {

using rngchan::Purpose;
using rngchan::RandomStream;
using rngchan::StreamKey;

void shuffle_positions(std::vector<int>& v, RandomStream& rs) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rs.below(i)]);
}

void check_lengths(std::size_t grads, std::size_t fading, const char* what) {
  if (grads == 0) throw std::invalid_argument(std::string(what) + ": no clients");
  if (grads != fading) {
    throw std::invalid_argument(std::string(what) + ": gradient and fading counts differ");
  }
}

}  // namespace

AggregationScheme AggregationScheme::blind() { return AggregationScheme(); }

AggregationScheme AggregationScheme::truncated_inversion(double c_th, double gamma_t,
                                                        double delta_max) {
  if (!(c_th > 0.0)) throw std::invalid_argument("truncated inversion: c_th must be > 0");
  if (!(gamma_t > 0.0)) throw std::invalid_argument("truncated inversion: gamma_t must be > 0");
  if (delta_max < 0.0 || !(delta_max < c_th)) {
    throw std::invalid_argument("truncated inversion: need 0 <= delta_max < c_th");
  }
  AggregationScheme s;
  s.kind_ = SchemeKind::kTruncatedInversion;
  s.c_th_ = c_th;
  s.gamma_t_ = gamma_t;
  s.delta_max_ = delta_max;
  return s;
}

TrimPolicy TrimPolicy::norm_clip(double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("norm clip budget P_max must be > 0");
  TrimPolicy p;
  p.mode_ = TrimMode::kNormClip;
  p.budget_ = budget;
  return p;
}

LocalUpdate local_update(const models::Objective& objective, const Vector& w_t,
                         const LocalConfig& cfg, RandomStream& shuffle) {
  const int m = objective.size();
  if (cfg.E < 1) throw std::invalid_argument("local_update: E must be >= 1");
  if (cfg.B < 1 || cfg.B > m) throw std::invalid_argument("local_update: need 1 <= B <= M");
  if (!(cfg.eta_l > 0.0)) throw std::invalid_argument("local_update: eta_l must be > 0");
  const int batches = m / cfg.B;
  std::vector<int> order = models::iota_positions(m);
  LocalUpdate out{GradientVector::Zero(w_t.size()), w_t};
  for (int k = 0; k < cfg.E; ++k) {
    const int slot = k % batches;
    if (slot == 0) shuffle_positions(order, shuffle);
    const std::span<const int> batch(order.data() + slot * cfg.B,
                                     static_cast<std::size_t>(cfg.B));
    const GradientVector g = objective.grad(out.final_weights, batch);
    out.accumulated += g;
    out.final_weights -= cfg.eta_l * g;
  }
  return out;
}

GradientVector trim(const GradientVector& g, const TrimPolicy& policy) {
  if (policy.mode() == TrimMode::kNone) return g;
  const double norm = g.norm();
  if (norm <= policy.budget()) return g;
  return g * (policy.budget() / norm);
}

GradientVector aggregate_blind(std::span<const GradientVector> grads,
                               std::span<const double> fading,
                               const GradientVector& noise) {
  check_lengths(grads.size(), fading.size(), "aggregate_blind");
  GradientVector sum = GradientVector::Zero(grads.front().size());
  for (std::size_t n = 0; n < grads.size(); ++n) sum += fading[n] * grads[n];
  sum += noise;
  return sum / static_cast<double>(grads.size());
}

double sample_csi_error(RandomStream& stream, double delta_max) {
  if (delta_max < 0.0) throw std::invalid_argument("sample_csi_error: delta_max must be >= 0");
  if (delta_max == 0.0) return 0.0;
  return delta_max * (2.0 * stream.uniform() - 1.0);
}

PowerControlResult aggregate_power_control(std::span<const GradientVector> grads,
                                           std::span<const double> true_fading,
                                           std::span<const double> csi_errors,
                                           const AggregationScheme& scheme,
                                           const GradientVector& noise) {
  check_lengths(grads.size(), true_fading.size(), "aggregate_power_control");
  check_lengths(grads.size(), csi_errors.size(), "aggregate_power_control");
  if (scheme.kind() != SchemeKind::kTruncatedInversion) {
    throw std::invalid_argument("aggregate_power_control needs a truncated inversion scheme");
  }
  PowerControlResult out;
  out.g = GradientVector::Zero(grads.front().size());
  for (std::size_t n = 0; n < grads.size(); ++n) {
    const double estimated = true_fading[n] + csi_errors[n];
    if (estimated >= scheme.c_th()) {
      out.g += (true_fading[n] / estimated) * grads[n];
      out.participants.push_back(static_cast<int>(n));
    }
  }
  if (out.participants.empty()) {
    out.g.setZero();
    out.empty = true;
    return out;
  }
  out.g += noise / std::sqrt(scheme.gamma_t());
  out.g /= static_cast<double>(out.participants.size());
  return out;
}

LearningRates lr_schedule(ScheduleKind kind, double eta_0, double mu_c, int t) {
  if (!(eta_0 > 0.0)) throw std::invalid_argument("lr_schedule: eta_0 must be > 0");
  if (!(mu_c > 0.0)) throw std::invalid_argument("lr_schedule: mu_c must be > 0");
  if (t < 0) throw std::invalid_argument("lr_schedule: t must be >= 0");
  switch (kind) {
    case ScheduleKind::kFixedBlind:
      return {eta_0 / mu_c, eta_0};
    case ScheduleKind::kDecayBlind: {
      const double eta_t = eta_0 / (1.0 + t);
      return {eta_t, mu_c * eta_t};
    }
    case ScheduleKind::kFixedInversion:
      return {eta_0, eta_0};
  }
  return {};
}

Vector server_step(const Vector& w_t, const GradientVector& g_t, double eta_t) {
  if (w_t.size() != g_t.size()) throw std::invalid_argument("server_step: dimension mismatch");
  return w_t - eta_t * g_t;
}

TrainingRun run_training(const TrainingConfig& config) {
  const int n_clients = static_cast<int>(config.clients.size());
  if (n_clients == 0) throw std::invalid_argument("run_training: no clients");
  if (config.rounds < 0) throw std::invalid_argument("run_training: rounds must be >= 0");
  if (config.w0.size() != config.clients.front()->dim()) {
    throw std::invalid_argument("run_training: w0 dimension mismatch");
  }
  const double mu_c = rngchan::fading_moments(config.channel).mean;
  const bool inversion = config.scheme.kind() == SchemeKind::kTruncatedInversion;
  const models::AverageObjective global(config.clients);
  const rngchan::NoiseSpec noise_spec{config.sigma_z_sq,
                                      static_cast<int>(config.w0.size())};

  TrainingRun run;
  run.records.reserve(static_cast<std::size_t>(config.rounds));
  Vector w = config.w0;
  std::vector<GradientVector> uploads(n_clients);
  for (int t = 0; t < config.rounds; ++t) {
    const LearningRates rates = lr_schedule(config.schedule, config.eta_0, mu_c, t);
    const LocalConfig local{config.E, config.B, rates.eta_l};
    const auto round = static_cast<std::uint64_t>(t);

    parallel_for(n_clients, config.workers, [&](int n) {
      RandomStream shuffle(StreamKey{config.master_seed, round,
                                     static_cast<std::uint64_t>(n), Purpose::kShuffle});
      uploads[n] = trim(local_update(*config.clients[n], w, local, shuffle).accumulated,
                        config.trim);
    });

    RoundRecord rec;
    rec.t = t;
    rec.w = w;
    rec.eta_t = rates.eta_t;
    rec.eta_l = rates.eta_l;
    rec.fading.resize(n_clients);
    for (int n = 0; n < n_clients; ++n) {
      RandomStream fs(StreamKey{config.master_seed, round, static_cast<std::uint64_t>(n),
                                Purpose::kFading});
      rec.fading[n] = config.channel.sample(fs);
    }
    RandomStream ns(StreamKey{config.master_seed, round, rngchan::kServer, Purpose::kNoise});
    const GradientVector xi = rngchan::sample_awgn(noise_spec, ns);

    if (inversion) {
      rec.csi_errors.resize(n_clients);
      for (int n = 0; n < n_clients; ++n) {
        RandomStream cs(StreamKey{config.master_seed, round, static_cast<std::uint64_t>(n),
                                  Purpose::kCsiError});
        rec.csi_errors[n] = sample_csi_error(cs, config.scheme.delta_max());
      }
      PowerControlResult pc =
          aggregate_power_control(uploads, rec.fading, rec.csi_errors, config.scheme, xi);
      rec.g = std::move(pc.g);
      rec.participants = std::move(pc.participants);
      rec.empty_round = pc.empty;
    } else {
      rec.g = aggregate_blind(uploads, rec.fading, xi);
      rec.participants.resize(n_clients);
      std::iota(rec.participants.begin(), rec.participants.end(), 0);
    }
    rec.discrepancy = metrics::hardening_discrepancy(uploads, rec.fading, mu_c);
    if (config.track_global) {
      rec.loss = global.mean_loss(w);
      rec.grad_norm_sq = global.mean_grad(w).squaredNorm();
    }
    if (config.keep_client_grads) rec.client_grads = uploads;

    w = server_step(w, rec.g, rates.eta_t);
    if (!w.allFinite()) throw DivergenceError(t);
    run.records.push_back(std::move(rec));
  }
  run.final_weights = std::move(w);
  return run;
}

}  // namespace otafl::fedcore
