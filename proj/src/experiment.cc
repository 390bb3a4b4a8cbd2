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

#include "otafl/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "otafl/rngchan.h"
#include "otafl/svg.h"

namespace otafl::expcli {

using nlohmann::json;
using rngchan::Purpose;
using rngchan::RandomStream;
using rngchan::StreamKey;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json vec_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(m.cols())) {
      throw std::runtime_error("constants: ragged entry_vars matrix");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

// Probe weights drawn from evenly spaced recorded snapshots.
std::vector<Vector> probe_weights(const std::vector<fedcore::RoundRecord>& records, int count) {
  std::vector<Vector> out;
  const auto T = records.size();
  for (int k = 0; k < count; ++k) {
    out.push_back(records[static_cast<std::size_t>(k) * T / static_cast<std::size_t>(count)].w);
  }
  return out;
}

bool has(const std::vector<std::string>& items, const std::string& name) {
  return std::find(items.begin(), items.end(), name) != items.end();
}

}  // namespace

std::string CellKey::id() const {
  return "N" + std::to_string(N) + "_s" + std::to_string(seed) + "_rho" + short_num(rho) +
         "_nl" + short_num(noise_level);
}

std::vector<CellKey> sweep_cells(const ExperimentConfig& config) {
  std::vector<CellKey> cells;
  for (int n : config.sweep.clients) {
    for (std::uint64_t s : config.seeds()) {
      for (double r : config.sweep.rho) {
        for (double l : config.sweep.noise_levels) cells.push_back({n, s, r, l});
      }
    }
  }
  return cells;
}

CellSetup build_cell(const ExperimentConfig& config, const CellKey& key) {
  CellSetup s;
  const DataConfig& dc = config.data;
  const int n = key.N;
  const int m = dc.local_size;
  if (dc.source == DataSource::kQuadratic) {
    s.quadratic = true;
    const datamod::QuadraticSpec q{dc.dim, n, dc.lambda, dc.L, dc.heterogeneity, m,
                                   dc.sample_spread};
    s.clients = models::make_quadratic_clients(datamod::gen_quadratic_problem(key.seed, q));
    s.param_dim = dc.dim;
  } else {
    datamod::Dataset pool;
    if (dc.source == DataSource::kSynthetic) {
      const int total = dc.pool_factor * n * m + dc.test_size;
      pool = datamod::gen_synthetic_classification(key.seed, dc.dim, dc.num_classes, total,
                                                   dc.separation);
    } else {
      pool = datamod::load_csv_dataset(dc.csv_path, {dc.dim, dc.num_classes});
    }
    const int train_rows = pool.size() - dc.test_size;
    if (train_rows < n * m) {
      throw datamod::DataError("dataset has " + std::to_string(pool.size()) +
                               " rows; need N * local_size + test_size = " +
                               std::to_string(n * m + dc.test_size));
    }
    auto train = std::make_shared<datamod::Dataset>(datamod::slice(pool, 0, train_rows));
    if (dc.test_size > 0) {
      s.test = std::make_shared<datamod::Dataset>(datamod::slice(pool, train_rows, pool.size()));
    }
    RandomStream part(StreamKey{key.seed, 0, rngchan::kServer, Purpose::kData, 1});
    const auto shards = datamod::partition_dirichlet(*train, n, dc.dir_alpha, m, part);
    for (const auto& sh : shards) s.substituted += sh.substituted;

    std::vector<std::vector<int>> labels(static_cast<std::size_t>(n));
    if (config.attack != AttackKind::kNone) {
      s.malicious = datamod::malicious_count(key.rho, n);
      for (int c = 0; c < s.malicious; ++c) {
        if (config.attack == AttackKind::kNoisyLabel) {
          RandomStream st(StreamKey{key.seed, 0, static_cast<std::uint64_t>(c), Purpose::kData, 2});
          labels[c] = datamod::apply_noisy_label_attack(shards[c], *train, key.noise_level, st);
        } else {
          labels[c] = datamod::apply_class_flip_attack(shards[c], *train, dc.num_classes);
        }
      }
    }
    s.spec = models::ModelSpec{models::ModelKind::kMultinomialLogistic, dc.dim,
                               dc.num_classes, config.model.l2_reg};
    s.clients = models::make_logistic_clients(s.spec, train, shards, labels);
    s.train = train;
    s.param_dim = s.spec.param_dim();
  }
  s.curvature = models::AverageObjective(s.clients).curvature();
  return s;
}

double resolved_eta_0(const ExperimentConfig& config, double L) {
  return config.schedule.inverse_L_fraction > 0 ? config.schedule.inverse_L_fraction / L
                                                : config.schedule.eta_0;
}

fedcore::TrainingConfig training_config(const ExperimentConfig& config,
                                        const CellSetup& setup, const CellKey& key) {
  fedcore::TrainingConfig tc;
  tc.clients = setup.clients;
  tc.w0 = Vector::Zero(setup.param_dim);
  tc.channel = config.channel.model();
  tc.sigma_z_sq = config.sigma_z_sq;
  if (config.scheme.kind == fedcore::SchemeKind::kTruncatedInversion) {
    const double c_th = config.scheme.c_th > 0
                            ? config.scheme.c_th
                            : rngchan::activity_threshold(tc.channel, config.scheme.p_active);
    tc.scheme = fedcore::AggregationScheme::truncated_inversion(c_th, config.scheme.gamma_t,
                                                                config.scheme.delta_max);
  }
  tc.E = config.E;
  tc.B = config.B;
  tc.schedule = config.schedule.kind;
  tc.eta_0 = resolved_eta_0(config, setup.curvature.L);
  tc.rounds = config.rounds;
  tc.master_seed = key.seed;
  if (config.trim_budget > 0) tc.trim = fedcore::TrimPolicy::norm_clip(config.trim_budget);
  tc.workers = config.workers;
  return tc;
}

json constants_to_json(const ConstantsFile& f) {
  const auto& in = f.inputs;
  const auto& es = f.estimates;
  json j;
  j["inputs"] = {{"L", in.L},
                 {"lambda", in.lambda},
                 {"Gamma", in.Gamma},
                 {"d", in.d},
                 {"sigma_z_sq", in.sigma_z_sq},
                 {"mu_c", in.mu_c},
                 {"N", in.N},
                 {"E", in.E},
                 {"B", in.B},
                 {"eta_l", in.eta_l},
                 {"eta_0", in.eta_0},
                 {"sigma_s_sq", vec_json(in.sigma_s_sq)},
                 {"G_sq", vec_json(in.G_sq)},
                 {"initial_dist_sq", in.initial_dist_sq},
                 {"initial_gap", in.initial_gap},
                 {"S", in.S},
                 {"gamma_t", in.gamma_t},
                 {"sigma_delta_sq", in.sigma_delta_sq},
                 {"c_th", in.c_th},
                 {"delta_max", in.delta_max}};
  j["estimates"] = {{"L", es.L},
                    {"lambda", es.lambda},
                    {"Gamma_hat", es.Gamma_hat},
                    {"sigma_s_sq_hat", vec_json(es.sigma_s_sq_hat)},
                    {"G_sq_hat", vec_json(es.G_sq_hat)},
                    {"entry_vars", matrix_json(es.entry_vars)},
                    {"entry_selection", es.entry_selection},
                    {"provenance", es.provenance}};
  j["overlays"] = f.overlays;
  return j;
}

ConstantsFile constants_from_json(const json& j) {
  ConstantsFile f;
  try {
    const json& in = j.at("inputs");
    auto& ci = f.inputs;
    ci.L = in.at("L").get<double>();
    ci.lambda = in.at("lambda").get<double>();
    ci.Gamma = in.at("Gamma").get<double>();
    ci.d = in.at("d").get<int>();
    ci.sigma_z_sq = in.at("sigma_z_sq").get<double>();
    ci.mu_c = in.at("mu_c").get<double>();
    ci.N = in.at("N").get<int>();
    ci.E = in.at("E").get<int>();
    ci.B = in.at("B").get<int>();
    ci.eta_l = in.at("eta_l").get<double>();
    ci.eta_0 = in.at("eta_0").get<double>();
    ci.sigma_s_sq = in.at("sigma_s_sq").get<std::vector<double>>();
    ci.G_sq = in.at("G_sq").get<std::vector<double>>();
    ci.initial_dist_sq = in.at("initial_dist_sq").get<double>();
    ci.initial_gap = in.at("initial_gap").get<double>();
    ci.S = in.at("S").get<double>();
    ci.gamma_t = in.at("gamma_t").get<double>();
    ci.sigma_delta_sq = in.at("sigma_delta_sq").get<double>();
    ci.c_th = in.at("c_th").get<double>();
    ci.delta_max = in.at("delta_max").get<double>();
    const json& es = j.at("estimates");
    auto& ce = f.estimates;
    ce.L = es.at("L").get<double>();
    ce.lambda = es.at("lambda").get<double>();
    ce.Gamma_hat = es.at("Gamma_hat").get<double>();
    ce.sigma_s_sq_hat = es.at("sigma_s_sq_hat").get<std::vector<double>>();
    ce.G_sq_hat = es.at("G_sq_hat").get<std::vector<double>>();
    ce.entry_vars = matrix_from_json(es.at("entry_vars"));
    ce.entry_selection = es.at("entry_selection").get<std::vector<int>>();
    ce.provenance = es.at("provenance").get<std::vector<std::string>>();
    f.overlays = j.at("overlays").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed constants file: ") + e.what());
  }
  return f;
}

ConstantsFile read_constants(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return constants_from_json(j);
}

double overlay_value(const std::string& overlay, const bounds::ConvergenceInputs& in, int t) {
  if (overlay == "cvx_fixed_lr") return bounds::cvx_fixed_lr_bound(in, t);
  if (overlay == "cvx_decay_lr") return bounds::cvx_decay_lr_bound(in, t);
  if (overlay == "noncvx_fixed_lr") return bounds::noncvx_fixed_lr_bound(in, t + 1);
  if (overlay == "noncvx_decay_lr") {
    return t + 1 < 2 ? kNaN : bounds::noncvx_decay_lr_bound(in, t + 1);
  }
  if (overlay == "power_control") return bounds::power_control_bound(in, t + 1);
  throw std::invalid_argument("unknown overlay '" + overlay + "'");
}

std::string bound_curves_csv(const ConstantsFile& file, int rounds) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  std::string out = "t";
  for (const auto& o : file.overlays) out += ",bound_" + o;
  out += '\n';
  for (int t = 0; t < rounds; ++t) {
    out += std::to_string(t);
    for (const auto& o : file.overlays) out += "," + num(overlay_value(o, file.inputs, t));
    out += '\n';
  }
  return out;
}

CellResult run_cell(const ExperimentConfig& config, const CellKey& key) {
  namespace fs = std::filesystem;
  CellResult r;
  r.key = key;
  r.final_accuracy = kNaN;
  r.final_dist_sq = kNaN;
  r.mi_bound = kNaN;
  r.Gamma_hat = kNaN;
  const fs::path dir(config.output.dir);
  r.csv_path = (dir / "cells" / (key.id() + ".csv")).string();
  r.constants_path = (dir / "constants" / (key.id() + ".json")).string();
  try {
    const CellSetup setup = build_cell(config, key);
    const fedcore::TrainingConfig tc = training_config(config, setup, key);
    const fedcore::TrainingRun run = fedcore::run_training(tc);
    const auto& records = run.records;
    const models::AverageObjective global(setup.clients);
    const rngchan::FadingMoments moments = rngchan::fading_moments(tc.channel);
    r.L = setup.curvature.L;
    r.lambda = setup.curvature.lambda;

    ConstantsFile cf;
    cf.overlays = config.overlays;
    auto& in = cf.inputs;
    auto& est = cf.estimates;
    in.L = est.L = setup.curvature.L;
    in.lambda = est.lambda = setup.curvature.lambda;
    in.d = setup.param_dim;
    in.sigma_z_sq = config.sigma_z_sq;
    in.mu_c = moments.mean;
    in.N = key.N;
    in.E = config.E;
    in.B = config.B;
    in.eta_l = records.front().eta_l;
    in.eta_0 = tc.eta_0;
    if (tc.scheme.kind() == fedcore::SchemeKind::kTruncatedInversion) {
      in.c_th = tc.scheme.c_th();
      in.gamma_t = tc.scheme.gamma_t();
      in.delta_max = tc.scheme.delta_max();
      in.sigma_delta_sq = in.delta_max * in.delta_max / 3.0;
      in.S = key.N * (1.0 - tc.channel.cdf(in.c_th));
    }
    est.provenance.push_back("L and lambda from closed-form curvature of the local objectives");

    const bool need_constants = !config.overlays.empty();
    std::optional<Vector> w_star;
    double f_star = 0.0;
    if (setup.curvature.lambda > 0 && (need_constants || setup.quadratic)) {
      const metrics::GammaEstimate g = metrics::estimate_gamma(setup.clients,
                                                               config.estimates.gamma_tol);
      in.Gamma = est.Gamma_hat = g.gamma;
      r.Gamma_hat = g.gamma;
      w_star = g.w_star;
      f_star = g.f_star;
      est.provenance.push_back("Gamma_hat: minimizers to gradient norm " +
                               short_num(config.estimates.gamma_tol) +
                               (g.clamped ? "; raw gap below -10 tol clamped to 0" : ""));
      in.initial_dist_sq = (tc.w0 - *w_star).squaredNorm();
    } else {
      est.provenance.push_back(
          "f* lower-bounded by 0 (cross-entropy is non-negative); Gamma not estimated");
    }
    in.initial_gap = std::max(0.0, global.mean_loss(tc.w0) - f_star);

    if (need_constants) {
      const std::vector<Vector> probes =
          probe_weights(records, config.estimates.probe_weights);
      const fedcore::LocalConfig local{config.E, config.B, in.eta_l};
      for (int n = 0; n < key.N; ++n) {
        const auto client = static_cast<std::uint64_t>(n);
        RandomStream ss(StreamKey{key.seed, 0, client, Purpose::kData, 10});
        RandomStream gs(StreamKey{key.seed, 0, client, Purpose::kData, 11});
        est.sigma_s_sq_hat.push_back(
            metrics::estimate_sigma_s(*setup.clients[n], probes, config.B, ss));
        est.G_sq_hat.push_back(metrics::estimate_G(*setup.clients[n], local, probes,
                                                   config.estimates.probe_rounds, tc.trim, gs));
      }
      in.sigma_s_sq = est.sigma_s_sq_hat;
      in.G_sq = est.G_sq_hat;
      est.provenance.push_back(
          "sigma_s_sq_hat: " + std::to_string(config.estimates.probe_weights) +
          " probe weights from recorded snapshots, " + std::to_string(metrics::kSigmaResamples) +
          " batches each drawn without replacement");
      est.provenance.push_back("G_sq_hat: 1.2 x max mean squared upload over " +
                               std::to_string(config.estimates.probe_rounds) +
                               " probe local updates per weight");
    }
    if (config.estimates.mutual_information) {
      metrics::ProbeConfig probe;
      probe.redraws = config.estimates.entry_redraws;
      probe.d_star = config.estimates.d_star;
      probe.workers = config.workers;
      const metrics::EntryVariances ev = metrics::entry_variance_probe(
          setup.clients, records[config.estimates.mi_round].w,
          fedcore::LocalConfig{config.E, config.B, records[config.estimates.mi_round].eta_l},
          tc.channel, tc.trim, key.seed, config.estimates.mi_round, probe);
      est.entry_vars = ev.variances;
      est.entry_selection = ev.selected;
      est.provenance.push_back("entry_vars: " + std::to_string(ev.redraws) +
                               " redraws at round " +
                               std::to_string(config.estimates.mi_round) + "; " +
                               ev.selection_rule);
      r.mi_bound = bounds::mi_bound_general(
          bounds::MiBoundInputs{key.N, config.estimates.C_g, config.sigma_z_sq, ev.variances});
    }

    // Per-round table.
    std::string header = "t,loss,grad_norm_sq,discrepancy,participants,eta_t";
    const bool want_R = has(config.overlays, "noncvx_fixed_lr") ||
                        has(config.overlays, "power_control");
    const bool want_min = has(config.overlays, "noncvx_decay_lr");
    if (w_star) header += ",dist_sq";
    if (want_R) header += ",R";
    if (want_min) header += ",min_grad_norm_sq";
    for (const auto& o : config.overlays) header += ",bound_" + o;
    std::string body = header + "\n";
    double running = 0.0;
    double running_min = std::numeric_limits<double>::infinity();
    double discrepancy_sum = 0.0;
    long dropped = 0;
    for (const auto& rec : records) {
      running += rec.grad_norm_sq;
      running_min = std::min(running_min, rec.grad_norm_sq);
      discrepancy_sum += rec.discrepancy;
      dropped += key.N - static_cast<long>(rec.participants.size());
      if (rec.empty_round) ++r.empty_rounds;
      std::string row = std::to_string(rec.t) + "," + num(rec.loss) + "," +
                        num(rec.grad_norm_sq) + "," + num(rec.discrepancy) + "," +
                        std::to_string(rec.participants.size()) + "," + num(rec.eta_t);
      if (w_star) row += "," + num((rec.w - *w_star).squaredNorm());
      if (want_R) row += "," + num(running / (rec.t + 1));
      if (want_min) row += "," + num(running_min);
      for (const auto& o : config.overlays) {
        try {
          row += "," + num(overlay_value(o, in, rec.t));
        } catch (const std::invalid_argument& e) {
          throw std::runtime_error("overlay " + o + ": " + e.what());
        }
      }
      body += row + "\n";
    }
    const int T = static_cast<int>(records.size());
    r.final_loss = global.mean_loss(run.final_weights);
    r.final_grad_norm_sq = global.mean_grad(run.final_weights).squaredNorm();
    r.mean_discrepancy = discrepancy_sum / T;
    r.R_T = running / T;
    r.dropout_fraction = static_cast<double>(dropped) / (static_cast<double>(key.N) * T);
    if (w_star) r.final_dist_sq = (run.final_weights - *w_star).squaredNorm();
    if (setup.test) r.final_accuracy = models::accuracy(setup.spec, run.final_weights, *setup.test);

    write_file_atomic(r.csv_path, body);
    write_file_atomic(r.constants_path, constants_to_json(cf).dump(2) + "\n");
    if (config.output.emit_svg) {
      ChartSpec chart{"Training curves " + key.id(), "t", {"loss", "grad_norm_sq"}, false,
                      true};
      emit_svg(r.csv_path, chart, (dir / "cells" / (key.id() + ".svg")).string());
      if (!config.overlays.empty()) {
        ChartSpec over{"Bound overlays " + key.id(), "t", {}, false, true};
        if (w_star) over.y_columns.push_back("dist_sq");
        if (want_R) over.y_columns.push_back("R");
        if (want_min) over.y_columns.push_back("min_grad_norm_sq");
        for (const auto& o : config.overlays) over.y_columns.push_back("bound_" + o);
        emit_svg(r.csv_path, over, (dir / "cells" / (key.id() + "_bounds.svg")).string());
      }
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (std::set<double>(lx.begin(), lx.end()).size() < 2) return kNaN;
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

RunOutput run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  namespace fs = std::filesystem;
  validate(config);
  RunOutput out;
  const std::vector<CellKey> cells = sweep_cells(config);
  if (!options.only_cell.empty()) {
    for (const auto& key : cells) {
      if (key.id() == options.only_cell) {
        out.cells.push_back(run_cell(config, key));
        out.failures = out.cells.back().ok ? 0 : 1;
        return out;
      }
    }
    throw ConfigError({"--cell: no cell named '" + options.only_cell + "' in the sweep"});
  }
  for (const auto& key : cells) out.cells.push_back(run_cell(config, key));

  // Slope of mean discrepancy against N within each (rho, noise level) group,
  // averaging seeds per N first.
  std::map<std::pair<double, double>, std::map<int, std::vector<double>>> groups;
  for (const auto& c : out.cells) {
    if (c.ok) groups[{c.key.rho, c.key.noise_level}][c.key.N].push_back(c.mean_discrepancy);
  }
  std::map<std::pair<double, double>, double> slopes;
  for (const auto& [g, by_n] : groups) {
    std::vector<double> xs, ys;
    for (const auto& [n, vals] : by_n) {
      double s = 0;
      for (double v : vals) s += v;
      xs.push_back(n);
      ys.push_back(s / static_cast<double>(vals.size()));
    }
    slopes[g] = loglog_slope(xs, ys);
  }

  const fs::path dir(config.output.dir);
  std::string summary =
      "cell,N,seed,rho,noise_level,status,error,final_loss,final_grad_norm_sq,"
      "mean_discrepancy,final_accuracy,final_dist_sq,R_T,dropout_fraction,empty_rounds,"
      "mi_bound,Gamma_hat,L,lambda,loglog_slope_discrepancy\n";
  for (const auto& c : out.cells) {
    const auto it = slopes.find({c.key.rho, c.key.noise_level});
    const double slope = it == slopes.end() ? kNaN : it->second;
    summary += c.key.id() + "," + std::to_string(c.key.N) + "," + std::to_string(c.key.seed) +
               "," + num(c.key.rho) + "," + num(c.key.noise_level) + "," +
               (c.ok ? "ok" : "failed") + "," + csv_quote(c.error) + ",";
    if (c.ok) {
      summary += num(c.final_loss) + "," + num(c.final_grad_norm_sq) + "," +
                 num(c.mean_discrepancy) + "," + num(c.final_accuracy) + "," +
                 num(c.final_dist_sq) + "," + num(c.R_T) + "," + num(c.dropout_fraction) +
                 "," + std::to_string(c.empty_rounds) + "," + num(c.mi_bound) + "," +
                 num(c.Gamma_hat) + "," + num(c.L) + "," + num(c.lambda) + ",";
    } else {
      summary += "nan,nan,nan,nan,nan,nan,nan,0,nan,nan,nan,nan,";
    }
    summary += num(slope) + "\n";
    if (!c.ok) ++out.failures;
  }
  out.summary_path = (dir / "summary.csv").string();
  write_file_atomic(out.summary_path, summary);
  out.summary_hash = hex64(fnv1a64(summary));

  if (config.output.emit_svg && slopes.size() == 1 && groups.begin()->second.size() >= 2) {
    const CsvTable table = parse_csv(summary);
    ChartSpec chart{"Mean discrepancy vs N", "N", {"mean_discrepancy"}, true, true};
    write_file_atomic((dir / "summary_discrepancy.svg").string(), render_svg(table, chart));
    if (config.estimates.mutual_information) {
      ChartSpec mi{"Mutual information bound vs N", "N", {"mi_bound"}, true, false};
      write_file_atomic((dir / "summary_mi.svg").string(), render_svg(table, mi));
    }
  }

  json manifest;
  manifest["name"] = config.name;
  manifest["config"] = to_json(config);
  manifest["config_hash"] = config_hash(config);
  json cell_list = json::array();
  for (const auto& c : out.cells) {
    json entry = {{"id", c.key.id()},
                  {"N", c.key.N},
                  {"seed", c.key.seed},
                  {"rho", c.key.rho},
                  {"noise_level", c.key.noise_level},
                  {"status", c.ok ? "ok" : "failed"},
                  {"error", c.error}};
    if (c.ok) {
      entry["csv"] = fs::relative(c.csv_path, dir).generic_string();
      entry["csv_fnv1a"] = hex64(fnv1a64(read_file(c.csv_path)));
      entry["constants"] = fs::relative(c.constants_path, dir).generic_string();
      entry["constants_fnv1a"] = hex64(fnv1a64(read_file(c.constants_path)));
    }
    cell_list.push_back(std::move(entry));
  }
  manifest["cells"] = std::move(cell_list);
  manifest["summary"] = "summary.csv";
  manifest["summary_fnv1a"] = out.summary_hash;
  out.manifest_path = (dir / "manifest.json").string();
  write_file_atomic(out.manifest_path, manifest.dump(2) + "\n");
  return out;
}

ExperimentConfig config_from_manifest(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError({"<root>: malformed manifest: " + std::string(e.what())});
  }
  if (!j.is_object() || !j.contains("config")) {
    throw ConfigError({"<root>: manifest has no \"config\" object"});
  }
  ExperimentConfig c = from_json(j.at("config"));
  if (j.contains("config_hash") && j["config_hash"] != config_hash(c)) {
    throw ConfigError({"config_hash: does not match the embedded config"});
  }
  return c;
}

ExperimentConfig baseline_preset() {
  ExperimentConfig c;
  c.name = "baseline";
  c.data.source = DataSource::kSynthetic;
  c.data.dim = 20;
  c.data.num_classes = 10;
  c.data.local_size = 500;
  c.data.dir_alpha = 0.1;
  c.B = 50;
  c.E = c.data.local_size / c.B;
  c.schedule.kind = fedcore::ScheduleKind::kFixedBlind;
  c.schedule.eta_0 = 0.03;
  c.rounds = 200;
  c.sweep.clients = {100};
  c.output.dir = "out/baseline";
  return c;
}

std::vector<std::pair<std::string, ExperimentConfig>> presets() {
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  out.emplace_back("baseline", baseline_preset());

  {
    ExperimentConfig c;
    c.name = "hardening";
    c.data.dim = 20;
    c.data.num_classes = 4;
    c.data.local_size = 20;
    c.data.dir_alpha = 0.5;
    c.data.test_size = 200;
    c.E = 1;
    c.B = 10;
    c.schedule.eta_0 = 0.05;
    c.rounds = 200;
    c.sweep.clients = {10, 20, 50, 100, 200};
    c.sweep.seeds = {1, 2, 3};
    c.output.dir = "out/hardening";
    out.emplace_back(c.name, c);
  }
  {
    ExperimentConfig c;
    c.name = "mi_decay";
    c.model.kind = ModelKind::kQuadratic;
    c.data.source = DataSource::kQuadratic;
    c.data.dim = 16;
    c.data.local_size = 20;
    c.data.lambda = 0.5;
    c.data.L = 1.0;
    c.data.sample_spread = 0.0;
    c.E = 1;
    c.B = 5;
    c.schedule.eta_0 = 0.1;
    c.sigma_z_sq = 0.01;
    c.rounds = 1;
    c.sweep.clients = {2, 5, 10, 20, 50, 100, 200, 250, 500};
    c.estimates.mutual_information = true;
    c.estimates.entry_redraws = 16000;
    c.output.dir = "out/mi_decay";
    out.emplace_back(c.name, c);
  }
  {
    ExperimentConfig c;
    c.name = "cvx_fixed_lr";
    c.model.kind = ModelKind::kQuadratic;
    c.data.source = DataSource::kQuadratic;
    c.data.dim = 5;
    c.data.local_size = 10;
    c.data.lambda = 0.5;
    c.data.L = 2.0;
    c.data.heterogeneity = 0.5;
    c.data.sample_spread = 0.5;
    c.E = 3;
    c.B = 2;
    c.schedule.kind = fedcore::ScheduleKind::kFixedBlind;
    c.schedule.inverse_L_fraction = 0.25;
    c.sigma_z_sq = 1.0;
    c.rounds = 300;
    c.sweep.clients = {10, 50};
    c.overlays = {"cvx_fixed_lr"};
    c.output.dir = "out/cvx_fixed_lr";
    out.emplace_back(c.name, c);
  }
  {
    // The step cap eta_0 <= 1/(4 mu_c L) together with lambda mu_c eta_0 > 1
    // needs lambda > 4L, which no L-smooth, lambda-strongly convex objective
    // has; this preset uses the largest admissible ratio and its overlay is
    // expected to be rejected.
    ExperimentConfig c;
    c.name = "cvx_decay_lr";
    c.model.kind = ModelKind::kQuadratic;
    c.data.source = DataSource::kQuadratic;
    c.data.dim = 5;
    c.data.local_size = 10;
    c.data.lambda = 1.0;
    c.data.L = 1.0;
    c.data.heterogeneity = 0.5;
    c.data.sample_spread = 0.5;
    c.E = 1;
    c.B = 2;
    c.schedule.kind = fedcore::ScheduleKind::kDecayBlind;
    c.schedule.inverse_L_fraction = 0.25;
    c.rounds = 300;
    c.sweep.clients = {10};
    c.overlays = {"cvx_decay_lr"};
    c.output.dir = "out/cvx_decay_lr";
    out.emplace_back(c.name, c);
  }
  {
    ExperimentConfig c;
    c.name = "fedsgd_floor";
    c.model.kind = ModelKind::kQuadratic;
    c.data.source = DataSource::kQuadratic;
    c.data.dim = 5;
    c.data.local_size = 1;
    c.data.lambda = 0.5;
    c.data.L = 1.0;
    c.E = 1;
    c.B = 1;
    c.schedule.kind = fedcore::ScheduleKind::kFixedBlind;
    c.schedule.inverse_L_fraction = 0.25;
    c.sigma_z_sq = 1.0;
    c.rounds = 500;
    c.sweep.clients = {20, 40};
    c.sweep.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    c.overlays = {"cvx_fixed_lr"};
    c.output.dir = "out/fedsgd_floor";
    out.emplace_back(c.name, c);
  }
  {
    ExperimentConfig c;
    c.name = "noncvx_fixed_lr";
    c.data.dim = 10;
    c.data.num_classes = 3;
    c.data.local_size = 20;
    c.data.dir_alpha = 0.5;
    c.data.test_size = 200;
    c.model.l2_reg = 0.01;
    c.E = 1;
    c.B = 5;
    c.schedule.kind = fedcore::ScheduleKind::kFixedBlind;
    c.schedule.inverse_L_fraction = 1.0;
    c.sigma_z_sq = 0.1;
    c.rounds = 200;
    c.sweep.clients = {20, 100};
    c.overlays = {"noncvx_fixed_lr"};
    c.output.dir = "out/noncvx_fixed_lr";
    out.emplace_back(c.name, c);
  }
  {
    ExperimentConfig c;
    c.name = "power_control";
    c.data.dim = 10;
    c.data.num_classes = 3;
    c.data.local_size = 20;
    c.data.dir_alpha = 0.5;
    c.data.test_size = 200;
    c.model.l2_reg = 0.01;
    c.E = 1;
    c.B = 5;
    c.scheme.kind = fedcore::SchemeKind::kTruncatedInversion;
    c.scheme.p_active = 0.99;
    c.scheme.delta_max = 0.1;
    c.schedule.kind = fedcore::ScheduleKind::kFixedInversion;
    c.schedule.inverse_L_fraction = 1.0;
    c.sigma_z_sq = 0.1;
    c.rounds = 100;
    c.sweep.clients = {10, 100};
    c.overlays = {"power_control"};
    c.output.dir = "out/power_control";
    out.emplace_back(c.name, c);
  }
  {
    ExperimentConfig c;
    c.name = "class_flip";
    c.data.dim = 10;
    c.data.num_classes = 4;
    c.data.separation = 6.0;
    c.data.local_size = 20;
    c.data.dir_alpha = 1.0;
    c.data.test_size = 400;
    c.attack = AttackKind::kClassFlip;
    c.E = 1;
    c.B = 10;
    c.schedule.eta_0 = 0.1;
    c.rounds = 100;
    c.sweep.clients = {20, 100};
    c.sweep.seeds = {1, 2, 3, 4, 5};
    c.sweep.rho = {0.3};
    c.output.dir = "out/class_flip";
    out.emplace_back(c.name, c);
  }
  return out;
}

}  // namespace otafl::expcli
