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

#include "otafl/bounds.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace otafl::bounds {
namespace {

constexpr double kRateTolerance = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

double sum_or_zero(const std::vector<double>& v, int n, const char* name) {
  if (v.empty()) return 0.0;
  require(static_cast<int>(v.size()) == n,
          std::string(name) + " must have one entry per client");
  for (double x : v) require(x >= 0.0, std::string(name) + " entries must be >= 0");
  return std::accumulate(v.begin(), v.end(), 0.0);
}

void check_common(const ConvergenceInputs& in) {
  require(in.L > 0.0, "L must be > 0");
  require(in.lambda >= 0.0 && in.lambda <= in.L, "need 0 <= lambda <= L");
  require(in.Gamma >= 0.0, "Gamma must be >= 0");
  require(in.d >= 1 && in.N >= 1 && in.E >= 1 && in.B >= 1, "d, N, E, B must be >= 1");
  require(in.sigma_z_sq >= 0.0, "sigma_z_sq must be >= 0");
  require(in.mu_c > 0.0, "mu_c must be > 0");
}

bool same_rate(double a, double b) {
  return std::abs(a - b) <= kRateTolerance * std::max(std::abs(a), std::abs(b));
}

double fourth_moment_term(double C_g, int d_star, int N) {
  return C_g * d_star / (N - 1.0);
}

}  // namespace

double ConvergenceInputs::sum_sigma_s_sq() const {
  return sum_or_zero(sigma_s_sq, N, "sigma_s_sq");
}

double ConvergenceInputs::sum_G_sq() const { return sum_or_zero(G_sq, N, "G_sq"); }

double mi_bound_general(const MiBoundInputs& in) {
  require(in.N >= 2, "MI bound needs N >= 2");
  require(in.entry_vars.rows() == in.N, "entry_vars must have N rows");
  require(in.d_star() >= 1, "entry_vars must have d* >= 1 columns");
  require(in.C_g >= 0.0 && in.sigma_z_sq >= 0.0, "C_g and sigma_z_sq must be >= 0");
  require((in.entry_vars.array() >= 0.0).all(), "entry variances must be >= 0");
  double log_sum = 0.0;
  for (int i = 0; i < in.d_star(); ++i) {
    const double rest = in.entry_vars.col(i).head(in.N - 1).sum() + in.sigma_z_sq;
    if (!(rest > 0.0)) throw PreconditionError("degenerate variance inputs");
    log_sum += std::log1p(in.entry_vars(in.N - 1, i) / rest);
  }
  return fourth_moment_term(in.C_g, in.d_star(), in.N) + 0.5 * log_sum;
}

double mi_bound_max_over_clients(const MiBoundInputs& in) {
  require(in.entry_vars.rows() == in.N, "entry_vars must have N rows");
  double best = 0.0;
  MiBoundInputs permuted = in;
  for (int n = 0; n < in.N; ++n) {
    permuted.entry_vars = in.entry_vars;
    permuted.entry_vars.row(n).swap(permuted.entry_vars.row(in.N - 1));
    best = std::max(best, mi_bound_general(permuted));
  }
  return best;
}

double mi_bound_iid_noiseless(double C_g, int d_star, int N) {
  require(N >= 2, "MI bound needs N >= 2");
  require(d_star >= 1 && C_g >= 0.0, "need d* >= 1 and C_g >= 0");
  return fourth_moment_term(C_g, d_star, N) +
         0.5 * d_star * std::log(static_cast<double>(N) / (N - 1.0));
}

double mi_bound_iid_noisy(double C_g, int N, std::span<const double> entry_vars,
                          double sigma_z_sq) {
  require(N >= 2, "MI bound needs N >= 2");
  require(!entry_vars.empty() && C_g >= 0.0 && sigma_z_sq >= 0.0,
          "need d* >= 1, C_g >= 0 and sigma_z_sq >= 0");
  const int d_star = static_cast<int>(entry_vars.size());
  double log_sum = 0.0;
  for (double s : entry_vars) {
    require(s >= 0.0, "entry variances must be >= 0");
    if (sigma_z_sq == 0.0) {
      log_sum += std::log(static_cast<double>(N) / (N - 1.0));
    } else {
      log_sum += std::log1p(s / ((N - 1.0) * s + sigma_z_sq));
    }
  }
  return fourth_moment_term(C_g, d_star, N) + 0.5 * log_sum;
}

HardeningTail hardening_tail_bound(double nu, double beta_nu, double G, int N,
                                   double eps) {
  require(nu > 0.0, "nu must be > 0");
  require(beta_nu >= 0.0 && beta_nu <= 1.0, "beta_nu must lie in [0, 1]");
  require(G > 0.0, "G must be > 0");
  require(N >= 1, "N must be >= 1");
  require(eps >= 0.0, "eps must be >= 0");
  const double beta_n = std::pow(beta_nu, N);
  HardeningTail out;
  out.threshold_offset = 2.0 * nu * beta_n * G;
  out.prob_bound =
      std::min(1.0, beta_n + std::exp(-N * eps * eps / (2.0 * nu * nu * G * G)));
  return out;
}

double cvx_fixed_lr_floor(const ConvergenceInputs& in) {
  check_common(in);
  require(in.lambda > 0.0, "strongly convex bound needs lambda > 0");
  require(in.eta_l > 0.0, "eta_l must be > 0");
  require(in.eta_l <= (1.0 + kRateTolerance) / (4.0 * in.L), "need eta_l <= 1/(4L)");
  const double n = in.N;
  const double contraction = std::pow(1.0 - in.lambda * in.eta_l, in.E);
  const double noise = in.d * in.eta_l * in.eta_l * in.sigma_z_sq /
                       (in.mu_c * in.mu_c * n * n) / (1.0 - contraction);
  const double drift =
      in.eta_l / in.lambda *
      (6.0 * in.L * in.Gamma +
       (1.0 / n + 2.0 * (in.E - 1)) * in.sum_sigma_s_sq() / (n * in.B));
  return noise + drift;
}

double cvx_fixed_lr_bound(const ConvergenceInputs& in, int t) {
  require(t >= 0, "t must be >= 0");
  const double floor = cvx_fixed_lr_floor(in);
  const double decay =
      std::pow(1.0 - in.lambda * in.eta_l, static_cast<double>(t) * in.E);
  return decay * in.initial_dist_sq + floor;
}

double cvx_decay_kappa(const ConvergenceInputs& in, bool enforce_step_cap) {
  check_common(in);
  require(in.lambda > 0.0, "strongly convex bound needs lambda > 0");
  require(in.eta_0 > 0.0, "eta_0 must be > 0");
  if (enforce_step_cap) {
    require(in.eta_0 <= (1.0 + kRateTolerance) / (4.0 * in.mu_c * in.L),
            "need eta_0 <= 1/(4 mu_c L)");
  }
  const double n = in.N;
  const double numerator =
      in.mu_c * in.mu_c * in.eta_0 * in.eta_0 *
      (6.0 * in.L * in.Gamma +
       (2.0 * n * (in.E - 1) + 1.0) * in.sum_sigma_s_sq() / (n * n * in.B));
  const double margin = in.lambda * in.mu_c * in.eta_0 - 1.0;
  if (margin <= 0.0) {
    if (numerator > 0.0) throw PreconditionError("kappa undefined; increase eta_0");
    return in.initial_dist_sq;
  }
  return std::max(numerator / margin, in.initial_dist_sq);
}

double cvx_decay_lr_bound(const ConvergenceInputs& in, int t) {
  require(t >= 0, "t must be >= 0");
  return cvx_decay_kappa(in) / (1.0 + t);
}

double noncvx_fixed_lr_bound(const ConvergenceInputs& in, int T) {
  check_common(in);
  require(T >= 1, "T must be >= 1");
  require(same_rate(in.eta_l, 1.0 / in.L), "rates need eta_l = 1/L");
  require(in.initial_gap >= 0.0, "f(w0) - f(w*) must be >= 0");
  const double n = in.N;
  const double e = in.E;
  return 2.0 * in.L * in.initial_gap / (T * e) +
         in.d * in.sigma_z_sq / (in.mu_c * in.mu_c * n * n * e) +
         in.sum_sigma_s_sq() / (n * n * in.B * e) +
         (e - 1.0) * (2.0 * e + 5.0) * in.sum_G_sq() / (6.0 * n);
}

double noncvx_decay_lr_bound(const ConvergenceInputs& in, int T) {
  check_common(in);
  require(T >= 2, "decaying-rate bound needs T >= 2");
  require(in.eta_0 > 0.0 && in.eta_0 < 1.0 / (in.mu_c * in.E * in.L),
          "need 0 < eta_0 < 1/(mu_c E L)");
  require(in.initial_gap >= 0.0, "f(w0) - f(w*) must be >= 0");
  const double n = in.N;
  const double e = in.E;
  const double log_t = std::log(static_cast<double>(T));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double bracket =
      in.d * in.sigma_z_sq / (in.mu_c * in.mu_c * n * n * e) +
      in.sum_sigma_s_sq() / (n * n * in.B) +
      in.L * in.L * in.eta_0 * in.eta_0 * in.mu_c * in.mu_c * pi2 * e * (e - 1.0) *
          (2.0 * e - 1.0) * in.sum_G_sq() / (90.0 * n);
  return 2.0 * in.initial_gap / (in.mu_c * in.eta_0 * e * log_t) +
         in.L * in.mu_c * in.eta_0 * pi2 / (3.0 * log_t) * bracket;
}

double power_control_bound(const ConvergenceInputs& in, int T) {
  check_common(in);
  require(T >= 1, "T must be >= 1");
  require(in.S > 0.0, "S = N P(c > c_th) must be > 0");
  require(in.c_th > in.delta_max, "need c_th > delta_max");
  require(in.gamma_t > 0.0, "gamma_t must be > 0");
  require(in.sigma_delta_sq >= 0.0, "sigma_delta_sq must be >= 0");
  require(same_rate(in.eta_l, 1.0 / in.L), "rates need eta_t = eta_l = 1/L");
  require(in.initial_gap >= 0.0, "f(w0) - f(w*) must be >= 0");
  const double n = in.N;
  const double e = in.E;
  const double s = in.S;
  const double g_sum = in.sum_G_sq();
  const double dropout = in.N > 1 ? 2.0 * (n - s) * g_sum / (s * n * (n - 1.0)) : 0.0;
  const double gap = in.c_th - in.delta_max;
  return 2.0 * in.L * in.initial_gap / (T * e) +
         in.d * in.sigma_z_sq / (s * s * in.gamma_t * e) +
         2.0 * in.sum_sigma_s_sq() / (n * n * in.B * e) +
         2.0 * (e - 1.0) * (e + 1.0) * g_sum / (3.0 * n) + dropout +
         e * in.sigma_delta_sq * g_sum / (s * n * gap * gap);
}

}  // namespace otafl::bounds
