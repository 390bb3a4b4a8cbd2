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

#ifndef OTAFL_BOUNDS_H_
#define OTAFL_BOUNDS_H_

#include <span>
#include <stdexcept>
#include <vector>

#include "otafl/types.h"

// Closed-form evaluators for the privacy, channel-hardening and convergence
// bounds. All mutual-information values are in nats.
namespace otafl::bounds {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MiBoundInputs {
  int N = 2;
  double C_g = 0.0;         // fourth-moment constant
  double sigma_z_sq = 0.0;  // thermal noise variance
  // N x d* per-entry variances of the preprocessed faded gradients; row n
  // belongs to client n, and the last row is the client whose leakage is
  // bounded.
  Matrix entry_vars;

  int d_star() const { return static_cast<int>(entry_vars.cols()); }
};

// C d*/(N-1) + 0.5 sum_i ln[(sum_{n<=N} s_ni + sz) / (sum_{n<N} s_ni + sz)].
double mi_bound_general(const MiBoundInputs& in);
// Maximum of mi_bound_general over which client is placed last.
double mi_bound_max_over_clients(const MiBoundInputs& in);

// C d*/(N-1) + (d*/2) ln(N/(N-1)).
double mi_bound_iid_noiseless(double C_g, int d_star, int N);
// C d*/(N-1) + 0.5 sum_i ln[(N s_i + sz)/((N-1) s_i + sz)]; d* = size of
// `entry_vars`.
double mi_bound_iid_noisy(double C_g, int N, std::span<const double> entry_vars,
                          double sigma_z_sq);

struct HardeningTail {
  double threshold_offset = 0.0;  // 2 nu beta^N G
  double prob_bound = 0.0;        // min(1, beta^N + exp(-N eps^2 / (2 nu^2 G^2)))
};

HardeningTail hardening_tail_bound(double nu, double beta_nu, double G, int N,
                                   double eps);

struct ConvergenceInputs {
  double L = 1.0;
  double lambda = 0.0;
  double Gamma = 0.0;
  int d = 1;
  double sigma_z_sq = 0.0;
  double mu_c = 1.0;
  int N = 1;
  int E = 1;
  int B = 1;
  double eta_l = 0.0;
  double eta_0 = 0.0;
  std::vector<double> sigma_s_sq;  // per client; empty means all zero
  std::vector<double> G_sq;        // per client; empty means all zero
  double initial_dist_sq = 0.0;    // ||w_0 - w*||^2
  double initial_gap = 0.0;        // f(w_0) - f(w*)
  // Power control.
  double S = 0.0;  // N P(c > c_th)
  double gamma_t = 1.0;
  double sigma_delta_sq = 0.0;
  double c_th = 0.0;
  double delta_max = 0.0;

  double sum_sigma_s_sq() const;
  double sum_G_sq() const;
};

// Strongly convex, fixed rates eta_t = eta_l / mu_c with eta_l <= 1/(4L).
double cvx_fixed_lr_bound(const ConvergenceInputs& in, int t);
// Large-t limit of cvx_fixed_lr_bound (its two constant terms).
double cvx_fixed_lr_floor(const ConvergenceInputs& in);

// kappa for the decaying schedule eta_t = eta_0 / (1 + t). With
// `enforce_step_cap` the eta_0 <= 1/(4 mu_c L) precondition is checked.
double cvx_decay_kappa(const ConvergenceInputs& in, bool enforce_step_cap = true);
double cvx_decay_lr_bound(const ConvergenceInputs& in, int t);

// Non-convex, eta_l = 1/L and eta_t = eta_l / mu_c.
double noncvx_fixed_lr_bound(const ConvergenceInputs& in, int T);
// Non-convex, eta_t = eta_0 / (1 + t) with eta_0 < 1/(mu_c E L); T >= 2.
double noncvx_decay_lr_bound(const ConvergenceInputs& in, int T);

// Truncated channel inversion, eta_t = eta_l = 1/L.
double power_control_bound(const ConvergenceInputs& in, int T);

}  // namespace otafl::bounds

#endif  // OTAFL_BOUNDS_H_
