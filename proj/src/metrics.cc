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

#include "otafl/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "otafl/parallel.h"

namespace otafl::metrics {
namespace {

using rngchan::Purpose;
using rngchan::RandomStream;
using rngchan::StreamKey;

}  // namespace

double hardening_discrepancy(std::span<const GradientVector> grads,
                             std::span<const double> fading, double mu_c) {
  if (grads.empty() || grads.size() != fading.size()) {
    throw std::invalid_argument("hardening_discrepancy: lengths must agree and be non-zero");
  }
  GradientVector diff = GradientVector::Zero(grads.front().size());
  for (std::size_t n = 0; n < grads.size(); ++n) diff += (fading[n] - mu_c) * grads[n];
  return diff.norm() / static_cast<double>(grads.size());
}

GammaEstimate estimate_gamma(std::span<const models::ObjectivePtr> clients, double tol) {
  if (clients.empty()) throw std::invalid_argument("estimate_gamma: no clients");
  GammaEstimate out;
  double local_sum = 0.0;
  for (const auto& client : clients) {
    const models::Minimum m = models::local_minimize(*client, tol);
    out.local_minima.push_back(m.value);
    local_sum += m.value;
  }
  const models::AverageObjective global(
      std::vector<models::ObjectivePtr>(clients.begin(), clients.end()));
  const models::Minimum g = models::local_minimize(global, tol);
  out.w_star = g.w;
  out.f_star = g.value;
  out.raw = g.value - local_sum / static_cast<double>(clients.size());
  out.gamma = std::max(out.raw, 0.0);
  out.clamped = out.raw < -10.0 * tol;
  return out;
}

double estimate_sigma_s(const models::Objective& objective,
                        std::span<const Vector> probe_weights, int B,
                        RandomStream& stream, int resamples) {
  const int m = objective.size();
  if (B < 1 || B > m) throw std::invalid_argument("estimate_sigma_s: need 1 <= B <= M");
  if (static_cast<int>(probe_weights.size()) < kMinSigmaProbes) {
    throw std::invalid_argument("estimate_sigma_s: need >= 20 probe weights");
  }
  if (resamples < 1) throw std::invalid_argument("estimate_sigma_s: resamples >= 1");
  if (B == m) return 0.0;
  std::vector<int> order = models::iota_positions(m);
  double best = 0.0;
  for (const Vector& w : probe_weights) {
    const Vector full = objective.full_grad(w);
    double total = 0.0;
    for (int r = 0; r < resamples; ++r) {
      // First B slots of a partial Fisher-Yates pass are a uniform B-subset.
      for (int i = 0; i < B; ++i) {
        std::swap(order[i], order[i + stream.below(static_cast<std::uint64_t>(m - i))]);
      }
      const std::span<const int> batch(order.data(), static_cast<std::size_t>(B));
      total += (objective.grad(w, batch) - full).squaredNorm();
    }
    best = std::max(best, B * total / resamples);
  }
  return best;
}

double estimate_G(const models::Objective& objective, const fedcore::LocalConfig& cfg,
                  std::span<const Vector> probe_weights, int probe_rounds,
                  const fedcore::TrimPolicy& trim, RandomStream& stream) {
  if (probe_rounds < kMinGProbeRounds) {
    throw std::invalid_argument("estimate_G: need probe_rounds >= 10");
  }
  if (probe_weights.empty()) throw std::invalid_argument("estimate_G: no probes");
  double best = 0.0;
  for (const Vector& w : probe_weights) {
    double total = 0.0;
    for (int r = 0; r < probe_rounds; ++r) {
      const GradientVector up =
          fedcore::trim(fedcore::local_update(objective, w, cfg, stream).accumulated, trim);
      total += up.squaredNorm();
    }
    best = std::max(best, total / probe_rounds);
  }
  return kGSafetyFactor * best;
}

GradientVector signflip_preprocess(const GradientVector& g, RandomStream sign_stream) {
  GradientVector out = g;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (sign_stream() >> 63) out[i] = -out[i];
  }
  return out;
}

EntryVariances entry_variance_probe(std::span<const models::ObjectivePtr> clients,
                                    const Vector& w_t, const fedcore::LocalConfig& cfg,
                                    const rngchan::ChannelModel& channel,
                                    const fedcore::TrimPolicy& trim,
                                    std::uint64_t master_seed, int round,
                                    const ProbeConfig& probe) {
  if (probe.redraws < 2) throw std::invalid_argument("entry_variance_probe: need >= 2 redraws");
  if (clients.empty()) throw std::invalid_argument("entry_variance_probe: no clients");
  const int n_clients = static_cast<int>(clients.size());
  const int d = static_cast<int>(w_t.size());
  const int d_star = probe.d_star > 0 ? std::min(probe.d_star, d) : std::min(d, 8);
  const auto t = static_cast<std::uint64_t>(round);
  const RandomStream signs(StreamKey{master_seed, t, rngchan::kServer, Purpose::kSignflip});

  // Welford accumulation per client.
  Matrix full_var(n_clients, d);
  parallel_for(n_clients, probe.workers, [&](int n) {
    const auto client = static_cast<std::uint64_t>(n);
    Vector mean = Vector::Zero(d);
    Vector m2 = Vector::Zero(d);
    for (int r = 0; r < probe.redraws; ++r) {
      const auto sub = static_cast<std::uint64_t>(r) + 1;
      RandomStream shuffle(StreamKey{master_seed, t, client, Purpose::kShuffle, sub});
      RandomStream fade(StreamKey{master_seed, t, client, Purpose::kFading, sub});
      const GradientVector up =
          fedcore::trim(fedcore::local_update(*clients[n], w_t, cfg, shuffle).accumulated, trim);
      const GradientVector s = signflip_preprocess(channel.sample(fade) * up, signs);
      const Vector delta = s - mean;
      mean += delta / (r + 1.0);
      m2 += delta.cwiseProduct(s - mean);
    }
    full_var.row(n) = (m2 / (probe.redraws - 1.0)).transpose();
  });

  const Vector totals = full_var.colwise().sum().transpose();
  std::vector<int> order = models::iota_positions(d);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return totals[a] > totals[b]; });
  EntryVariances out;
  out.selected.assign(order.begin(), order.begin() + d_star);
  std::sort(out.selected.begin(), out.selected.end());
  out.variances.resize(n_clients, d_star);
  for (int j = 0; j < d_star; ++j) out.variances.col(j) = full_var.col(out.selected[j]);
  out.selection_rule = "top " + std::to_string(d_star) + " of " + std::to_string(d) +
                       " coordinates by client-summed variance";
  out.redraws = probe.redraws;
  return out;
}

EntryVariances entry_variance_probe(std::span<const models::ObjectivePtr> clients,
                                    const fedcore::RoundRecord& record, int E, int B,
                                    const rngchan::ChannelModel& channel,
                                    std::uint64_t master_seed, const ProbeConfig& probe) {
  return entry_variance_probe(clients, record.w, fedcore::LocalConfig{E, B, record.eta_l},
                              channel, fedcore::TrimPolicy::none(), master_seed, record.t,
                              probe);
}

double convergence_R(std::span<const fedcore::RoundRecord> records,
                     const models::Objective& global, int T) {
  if (T < 1 || static_cast<int>(records.size()) < T) {
    throw std::invalid_argument("convergence_R: records must cover rounds 0..T-1");
  }
  double total = 0.0;
  for (int t = 0; t < T; ++t) total += global.full_grad(records[t].w).squaredNorm();
  return total / T;
}

double min_grad_norm_sq(std::span<const fedcore::RoundRecord> records,
                        const models::Objective& global, int T) {
  if (T < 1 || static_cast<int>(records.size()) < T) {
    throw std::invalid_argument("min_grad_norm_sq: records must cover rounds 0..T-1");
  }
  double best = global.full_grad(records[0].w).squaredNorm();
  for (int t = 1; t < T; ++t) {
    best = std::min(best, global.full_grad(records[t].w).squaredNorm());
  }
  return best;
}

}  // namespace otafl::metrics
