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

#include "otafl/config.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace otafl::expcli {

using nlohmann::json;

namespace {

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += '\n';
    out += s;
  }
  return out;
}

std::string child_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <typename T>
struct EnumName {
  T value;
  const char* name;
};

constexpr EnumName<ModelKind> kModelNames[] = {{ModelKind::kLogistic, "logistic"},
                                               {ModelKind::kQuadratic, "quadratic"}};
constexpr EnumName<DataSource> kSourceNames[] = {{DataSource::kSynthetic, "synthetic"},
                                                 {DataSource::kCsv, "csv"},
                                                 {DataSource::kQuadratic, "quadratic"}};
constexpr EnumName<AttackKind> kAttackNames[] = {{AttackKind::kNone, "none"},
                                                 {AttackKind::kNoisyLabel, "noisy_label"},
                                                 {AttackKind::kClassFlip, "class_flip"}};
constexpr EnumName<ChannelFamily> kFamilyNames[] = {
    {ChannelFamily::kRayleigh, "rayleigh"},
    {ChannelFamily::kNakagami, "nakagami"},
    {ChannelFamily::kDegenerate, "degenerate"}};
constexpr EnumName<fedcore::SchemeKind> kSchemeNames[] = {
    {fedcore::SchemeKind::kBlind, "blind"},
    {fedcore::SchemeKind::kTruncatedInversion, "truncated_inversion"}};
constexpr EnumName<fedcore::ScheduleKind> kScheduleNames[] = {
    {fedcore::ScheduleKind::kFixedBlind, "fixed_blind"},
    {fedcore::ScheduleKind::kDecayBlind, "decay_blind"},
    {fedcore::ScheduleKind::kFixedInversion, "fixed_inversion"}};

template <typename T, std::size_t K>
const char* name_of(const EnumName<T> (&table)[K], T value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

// Reads fields of one JSON object, remembering which keys were consumed so
// leftovers can be reported.
class Fields {
 public:
  Fields(const json* node, std::string path, std::vector<std::string>* issues)
      : node_(node), path_(std::move(path)), issues_(issues) {
    if (node_ != nullptr && !node_->is_object()) {
      issues_->push_back(label() + ": expected an object");
      node_ = nullptr;
    }
  }

  ~Fields() {
    if (node_ == nullptr) return;
    for (const auto& item : node_->items()) {
      if (!used_.count(item.key())) {
        issues_->push_back(child_path(path_, item.key()) + ": unknown key");
      }
    }
  }

  Fields(const Fields&) = delete;
  Fields& operator=(const Fields&) = delete;

  Fields child(const std::string& key) {
    return Fields(find(key), child_path(path_, key), issues_);
  }

  const json* find(const std::string& key) {
    if (node_ == nullptr) return nullptr;
    used_.insert(key);
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return child_path(path_, key); }
  void issue(const std::string& key, const std::string& message) {
    issues_->push_back(path(key) + ": " + message);
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        issue(key, "expected a number");
      }
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer() && v->get<std::int64_t>() >= std::numeric_limits<int>::min() &&
          v->get<std::int64_t>() <= std::numeric_limits<int>::max()) {
        out = v->get<int>();
      } else {
        issue(key, "expected an integer");
      }
    }
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        issue(key, "expected a non-negative integer");
      }
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        issue(key, "expected true or false");
      }
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        issue(key, "expected a string");
      }
    }
  }
  template <typename T>
  void get(const std::string& key, std::vector<T>& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_array()) {
      issue(key, "expected an array");
      return;
    }
    std::vector<T> values;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const std::string where = "[" + std::to_string(i) + "]";
      if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) {
          issue(key + where, "expected a string");
          return;
        }
      } else if constexpr (std::is_same_v<T, double>) {
        if (!e.is_number()) {
          issue(key + where, "expected a number");
          return;
        }
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!e.is_number_unsigned()) {
          issue(key + where, "expected a non-negative integer");
          return;
        }
      } else {
        if (!e.is_number_integer()) {
          issue(key + where, "expected an integer");
          return;
        }
      }
      values.push_back(e.get<T>());
    }
    out = std::move(values);
  }
  template <typename T, std::size_t K>
  void get_enum(const std::string& key, const EnumName<T> (&table)[K], T& out) {
    std::string text;
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_string()) {
      issue(key, "expected a string");
      return;
    }
    text = v->get<std::string>();
    for (const auto& e : table) {
      if (text == e.name) {
        out = e.value;
        return;
      }
    }
    std::string allowed;
    for (const auto& e : table) allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
    issue(key, "unknown value '" + text + "' (expected one of " + allowed + ")");
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  const json* node_;
  std::string path_;
  std::vector<std::string>* issues_;
  std::set<std::string> used_;
};

struct DuplicateKey {
  std::string path;
};

// Parses JSON text, rejecting an object that repeats a key.
json parse_strict(const std::string& text) {
  struct Frame {
    bool is_object;
    std::set<std::string> keys;
    std::string current;
  };
  std::vector<Frame> stack;
  auto path = [&stack]() {
    std::string out;
    for (const auto& f : stack) {
      if (f.is_object && !f.current.empty()) out = child_path(out, f.current);
    }
    return out;
  };
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        stack.push_back({true, {}, {}});
        break;
      case json::parse_event_t::array_start:
        stack.push_back({false, {}, {}});
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        stack.pop_back();
        break;
      case json::parse_event_t::key: {
        Frame& top = stack.back();
        const std::string key = parsed.get<std::string>();
        top.current.clear();
        if (!top.keys.insert(key).second) throw DuplicateKey{child_path(path(), key)};
        top.current = key;
        break;
      }
      case json::parse_event_t::value:
        break;
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const DuplicateKey& dup) {
    throw ConfigError({dup.path + ": duplicate key"});
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<root>: malformed JSON: ") + e.what()});
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_lines(issues)), issues_(std::move(issues)) {}

rngchan::ChannelModel ChannelConfig::model() const {
  switch (family) {
    case ChannelFamily::kRayleigh:
      return unit_mean ? rngchan::ChannelModel::rayleigh_unit_mean()
                       : rngchan::ChannelModel::rayleigh(scale);
    case ChannelFamily::kNakagami:
      return unit_mean ? rngchan::ChannelModel::nakagami_unit_mean(m)
                       : rngchan::ChannelModel::nakagami(m, omega);
    case ChannelFamily::kDegenerate:
      return rngchan::ChannelModel::degenerate(value);
  }
  throw std::logic_error("unreachable channel family");
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  return sweep.seeds.empty() ? std::vector<std::uint64_t>{master_seed} : sweep.seeds;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["model"] = {{"kind", name_of(kModelNames, c.model.kind)}, {"l2_reg", c.model.l2_reg}};
  j["data"] = {{"source", name_of(kSourceNames, c.data.source)},
               {"csv_path", c.data.csv_path},
               {"dim", c.data.dim},
               {"num_classes", c.data.num_classes},
               {"separation", c.data.separation},
               {"local_size", c.data.local_size},
               {"dir_alpha", c.data.dir_alpha},
               {"pool_factor", c.data.pool_factor},
               {"test_size", c.data.test_size},
               {"lambda", c.data.lambda},
               {"L", c.data.L},
               {"heterogeneity", c.data.heterogeneity},
               {"sample_spread", c.data.sample_spread}};
  j["channel"] = {{"family", name_of(kFamilyNames, c.channel.family)},
                  {"unit_mean", c.channel.unit_mean},
                  {"scale", c.channel.scale},
                  {"m", c.channel.m},
                  {"omega", c.channel.omega},
                  {"value", c.channel.value}};
  j["sigma_z_sq"] = c.sigma_z_sq;
  j["scheme"] = {{"kind", name_of(kSchemeNames, c.scheme.kind)},
                 {"p_active", c.scheme.p_active},
                 {"c_th", c.scheme.c_th},
                 {"gamma_t", c.scheme.gamma_t},
                 {"delta_max", c.scheme.delta_max}};
  j["local"] = {{"E", c.E}, {"B", c.B}};
  j["schedule"] = {{"kind", name_of(kScheduleNames, c.schedule.kind)},
                   {"eta_0", c.schedule.eta_0},
                   {"inverse_L_fraction", c.schedule.inverse_L_fraction}};
  j["rounds"] = c.rounds;
  j["master_seed"] = c.master_seed;
  j["trim_budget"] = c.trim_budget;
  j["attack"] = name_of(kAttackNames, c.attack);
  j["sweep"] = {{"clients", c.sweep.clients},
                {"seeds", c.sweep.seeds},
                {"rho", c.sweep.rho},
                {"noise_levels", c.sweep.noise_levels}};
  j["overlays"] = c.overlays;
  j["estimates"] = {{"probe_weights", c.estimates.probe_weights},
                    {"probe_rounds", c.estimates.probe_rounds},
                    {"gamma_tol", c.estimates.gamma_tol},
                    {"mutual_information", c.estimates.mutual_information},
                    {"entry_redraws", c.estimates.entry_redraws},
                    {"d_star", c.estimates.d_star},
                    {"mi_round", c.estimates.mi_round},
                    {"C_g", c.estimates.C_g}};
  j["output"] = {{"dir", c.output.dir}, {"emit_svg", c.output.emit_svg}};
  j["workers"] = c.workers;
  return j;
}

namespace {

ExperimentConfig read_config(const json& node, std::vector<std::string>& issues) {
  ExperimentConfig c;
  Fields root(&node, "", &issues);
  root.get("name", c.name);
  {
    Fields f = root.child("model");
    f.get_enum("kind", kModelNames, c.model.kind);
    f.get("l2_reg", c.model.l2_reg);
  }
  {
    Fields f = root.child("data");
    f.get_enum("source", kSourceNames, c.data.source);
    f.get("csv_path", c.data.csv_path);
    f.get("dim", c.data.dim);
    f.get("num_classes", c.data.num_classes);
    f.get("separation", c.data.separation);
    f.get("local_size", c.data.local_size);
    f.get("dir_alpha", c.data.dir_alpha);
    f.get("pool_factor", c.data.pool_factor);
    f.get("test_size", c.data.test_size);
    f.get("lambda", c.data.lambda);
    f.get("L", c.data.L);
    f.get("heterogeneity", c.data.heterogeneity);
    f.get("sample_spread", c.data.sample_spread);
  }
  {
    Fields f = root.child("channel");
    f.get_enum("family", kFamilyNames, c.channel.family);
    f.get("unit_mean", c.channel.unit_mean);
    f.get("scale", c.channel.scale);
    f.get("m", c.channel.m);
    f.get("omega", c.channel.omega);
    f.get("value", c.channel.value);
  }
  root.get("sigma_z_sq", c.sigma_z_sq);
  {
    Fields f = root.child("scheme");
    f.get_enum("kind", kSchemeNames, c.scheme.kind);
    f.get("p_active", c.scheme.p_active);
    f.get("c_th", c.scheme.c_th);
    f.get("gamma_t", c.scheme.gamma_t);
    f.get("delta_max", c.scheme.delta_max);
  }
  {
    Fields f = root.child("local");
    f.get("E", c.E);
    f.get("B", c.B);
  }
  {
    Fields f = root.child("schedule");
    f.get_enum("kind", kScheduleNames, c.schedule.kind);
    f.get("eta_0", c.schedule.eta_0);
    f.get("inverse_L_fraction", c.schedule.inverse_L_fraction);
  }
  root.get("rounds", c.rounds);
  root.get("master_seed", c.master_seed);
  root.get("trim_budget", c.trim_budget);
  root.get_enum("attack", kAttackNames, c.attack);
  {
    Fields f = root.child("sweep");
    f.get("clients", c.sweep.clients);
    f.get("seeds", c.sweep.seeds);
    f.get("rho", c.sweep.rho);
    f.get("noise_levels", c.sweep.noise_levels);
  }
  root.get("overlays", c.overlays);
  {
    Fields f = root.child("estimates");
    f.get("probe_weights", c.estimates.probe_weights);
    f.get("probe_rounds", c.estimates.probe_rounds);
    f.get("gamma_tol", c.estimates.gamma_tol);
    f.get("mutual_information", c.estimates.mutual_information);
    f.get("entry_redraws", c.estimates.entry_redraws);
    f.get("d_star", c.estimates.d_star);
    f.get("mi_round", c.estimates.mi_round);
    f.get("C_g", c.estimates.C_g);
  }
  {
    Fields f = root.child("output");
    f.get("dir", c.output.dir);
    f.get("emit_svg", c.output.emit_svg);
  }
  root.get("workers", c.workers);
  return c;
}

void check_invariants(const ExperimentConfig& c, std::vector<std::string>& out) {
  auto bad = [&out](const std::string& field, const std::string& msg) {
    out.push_back(field + ": " + msg);
  };
  const bool quadratic = c.data.source == DataSource::kQuadratic;
  if ((c.model.kind == ModelKind::kQuadratic) != quadratic) {
    bad("model.kind", "quadratic model requires data.source = quadratic and vice versa");
  }
  if (c.model.l2_reg < 0) bad("model.l2_reg", "must be >= 0");
  if (c.data.dim < 1) bad("data.dim", "must be >= 1");
  if (c.data.local_size < 1) bad("data.local_size", "must be >= 1");
  if (!quadratic) {
    if (c.data.num_classes < 2) bad("data.num_classes", "must be >= 2");
    if (!(c.data.dir_alpha > 0)) bad("data.dir_alpha", "must be > 0");
    if (c.data.test_size < 0) bad("data.test_size", "must be >= 0");
    if (c.data.source == DataSource::kSynthetic) {
      if (c.data.pool_factor < 1) bad("data.pool_factor", "must be >= 1");
      if (!(c.data.separation >= 0)) bad("data.separation", "must be >= 0");
    }
    if (c.data.source == DataSource::kCsv && c.data.csv_path.empty()) {
      bad("data.csv_path", "required when data.source = csv");
    }
  } else {
    if (!(c.data.lambda > 0) || !(c.data.lambda <= c.data.L)) {
      bad("data.lambda", "need 0 < data.lambda <= data.L");
    }
    if (c.data.heterogeneity < 0) bad("data.heterogeneity", "must be >= 0");
    if (c.data.sample_spread < 0) bad("data.sample_spread", "must be >= 0");
    if (c.attack != AttackKind::kNone) bad("attack", "label attacks need classification data");
  }
  if (c.E < 1) bad("local.E", "must be >= 1");
  if (c.B < 1) bad("local.B", "must be >= 1");
  if (c.B > c.data.local_size) {
    bad("local.B", "local.B (" + std::to_string(c.B) + ") exceeds data.local_size (" +
                       std::to_string(c.data.local_size) + ")");
  }
  switch (c.channel.family) {
    case ChannelFamily::kRayleigh:
      if (!c.channel.unit_mean && !(c.channel.scale > 0)) bad("channel.scale", "must be > 0");
      break;
    case ChannelFamily::kNakagami:
      if (!(c.channel.m >= 0.5)) bad("channel.m", "must be >= 0.5");
      if (!c.channel.unit_mean && !(c.channel.omega > 0)) bad("channel.omega", "must be > 0");
      break;
    case ChannelFamily::kDegenerate:
      if (!(c.channel.value > 0)) bad("channel.value", "must be > 0");
      break;
  }
  if (!(c.sigma_z_sq >= 0)) bad("sigma_z_sq", "must be >= 0");
  if (c.scheme.kind == fedcore::SchemeKind::kTruncatedInversion) {
    if (c.scheme.c_th == 0 && !(c.scheme.p_active > 0 && c.scheme.p_active < 1)) {
      bad("scheme.p_active", "must lie in (0, 1)");
    }
    if (c.scheme.c_th < 0) bad("scheme.c_th", "must be >= 0");
    if (!(c.scheme.gamma_t > 0)) bad("scheme.gamma_t", "must be > 0");
    if (c.scheme.delta_max < 0) bad("scheme.delta_max", "must be >= 0");
    if (c.scheme.c_th > 0 && !(c.scheme.delta_max < c.scheme.c_th)) {
      bad("scheme.delta_max", "must be below scheme.c_th");
    }
  }
  if (c.schedule.inverse_L_fraction < 0) bad("schedule.inverse_L_fraction", "must be >= 0");
  if (c.schedule.inverse_L_fraction == 0 && !(c.schedule.eta_0 > 0)) {
    bad("schedule.eta_0", "must be > 0");
  }
  if (c.rounds < 1) bad("rounds", "must be >= 1");
  if (c.trim_budget < 0) bad("trim_budget", "must be >= 0");
  if (c.sweep.clients.empty()) bad("sweep.clients", "must not be empty");
  for (int n : c.sweep.clients) {
    if (n < 1) bad("sweep.clients", "entries must be >= 1");
  }
  if (c.sweep.rho.empty()) bad("sweep.rho", "must not be empty");
  for (double r : c.sweep.rho) {
    if (!(r >= 0 && r <= 1)) bad("sweep.rho", "entries must lie in [0, 1], got " + fmt(r));
  }
  if (c.sweep.noise_levels.empty()) bad("sweep.noise_levels", "must not be empty");
  for (double l : c.sweep.noise_levels) {
    if (!(l >= 0 && l <= 1)) {
      bad("sweep.noise_levels", "entries must lie in [0, 1], got " + fmt(l));
    }
  }
  std::set<std::string> seen;
  for (const auto& o : c.overlays) {
    bool known = false;
    for (const auto& name : kOverlayNames) known = known || name == o;
    if (!known) {
      bad("overlays", "unknown overlay '" + o + "'");
      continue;
    }
    if (!seen.insert(o).second) bad("overlays", "duplicate overlay '" + o + "'");
    const bool convex = quadratic || c.model.l2_reg > 0;
    using fedcore::ScheduleKind;
    if (o == "cvx_fixed_lr" || o == "cvx_decay_lr") {
      if (!convex) bad("overlays", o + " needs a strongly convex objective (model.l2_reg > 0)");
    }
    if ((o == "cvx_fixed_lr" || o == "noncvx_fixed_lr") &&
        c.schedule.kind != ScheduleKind::kFixedBlind) {
      bad("schedule.kind", o + " requires schedule.kind = fixed_blind");
    }
    if ((o == "cvx_decay_lr" || o == "noncvx_decay_lr") &&
        c.schedule.kind != ScheduleKind::kDecayBlind) {
      bad("schedule.kind", o + " requires schedule.kind = decay_blind");
    }
    if (o == "noncvx_fixed_lr" && c.schedule.inverse_L_fraction != 1.0) {
      bad("schedule.inverse_L_fraction", o + " requires eta_l = 1/L (inverse_L_fraction = 1)");
    }
    if (o == "cvx_fixed_lr" && c.schedule.inverse_L_fraction > 0.25) {
      bad("schedule.inverse_L_fraction", o + " requires eta_l <= 1/(4L)");
    }
    if (o == "power_control") {
      if (c.scheme.kind != fedcore::SchemeKind::kTruncatedInversion) {
        bad("scheme.kind", "power_control requires scheme.kind = truncated_inversion");
      }
      if (c.schedule.kind != ScheduleKind::kFixedInversion ||
          c.schedule.inverse_L_fraction != 1.0) {
        bad("schedule", "power_control requires fixed_inversion with inverse_L_fraction = 1");
      }
    }
    if (o == "noncvx_decay_lr" && c.rounds < 2) bad("rounds", o + " requires rounds >= 2");
  }
  if (c.estimates.probe_weights < 20) bad("estimates.probe_weights", "must be >= 20");
  if (c.estimates.probe_rounds < 10) bad("estimates.probe_rounds", "must be >= 10");
  if (!(c.estimates.gamma_tol > 0)) bad("estimates.gamma_tol", "must be > 0");
  if (c.estimates.mutual_information) {
    if (c.estimates.entry_redraws < 2) bad("estimates.entry_redraws", "must be >= 2");
    if (c.estimates.d_star < 0) bad("estimates.d_star", "must be >= 0");
    if (c.estimates.mi_round < 0 || c.estimates.mi_round >= c.rounds) {
      bad("estimates.mi_round", "must lie in [0, rounds)");
    }
    if (c.estimates.C_g < 0) bad("estimates.C_g", "must be >= 0");
    for (int n : c.sweep.clients) {
      if (n < 2) bad("sweep.clients", "mutual_information needs N >= 2");
    }
  }
  if (c.output.dir.empty()) bad("output.dir", "must not be empty");
  if (c.workers < 1) bad("workers", "must be >= 1");
}

}  // namespace

ExperimentConfig from_json(const json& node) {
  std::vector<std::string> issues;
  ExperimentConfig c = read_config(node, issues);
  // Fields that failed to read keep their defaults, so cross-field checks
  // still run and every problem is reported at once.
  check_invariants(c, issues);
  if (!issues.empty()) throw ConfigError(issues);
  return c;
}

void validate(const ExperimentConfig& config) {
  std::vector<std::string> issues;
  check_invariants(config, issues);
  if (!issues.empty()) throw ConfigError(issues);
}

ExperimentConfig parse_config_text(const std::string& text) {
  return from_json(parse_strict(text));
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"<root>: cannot read " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  return hex64(fnv1a64(to_json(config).dump()));
}

}  // namespace otafl::expcli
