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

#include "otafl/datamod.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace otafl::datamod {
namespace {

using rngchan::Purpose;
using rngchan::RandomStream;
using rngchan::StreamKey;

RandomStream data_stream(std::uint64_t seed, std::uint64_t client,
                         std::uint64_t tag) {
  return RandomStream(StreamKey{seed, 0, client, Purpose::kData, tag});
}

Matrix gaussian_matrix(RandomStream& rs, int rows, int cols, double sd) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = sd * rs.normal();
  }
  return m;
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, RandomStream& rs) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rs.below(i)]);
  }
}

// Largest-remainder rounding of total * p onto integers summing to total.
std::vector<int> apportion(const std::vector<double>& p, int total) {
  const int k = static_cast<int>(p.size());
  std::vector<int> counts(k);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int c = 0; c < k; ++c) {
    const double exact = p[c] * total;
    counts[c] = static_cast<int>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - counts[c], c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; assigned < total; ++i, ++assigned) {
    ++counts[remainders[i % k].second];
  }
  return counts;
}

int validated_label(long long value, int num_classes) {
  if (value < 0 || value >= num_classes) {
    throw DataError("label " + std::to_string(value) + " outside [0, " +
                    std::to_string(num_classes - 1) + "]");
  }
  return static_cast<int>(value);
}

}  // namespace

Dataset gen_synthetic_classification(std::uint64_t seed, int dim, int num_classes,
                                     int total, double separation) {
  if (num_classes < 2 || dim < 1 || total < num_classes) {
    throw std::invalid_argument(
        "gen_synthetic_classification: need K >= 2, d >= 1, M_total >= K");
  }
  Matrix centres = Matrix::Zero(num_classes, dim);
  const double radius = separation / std::sqrt(2.0);
  if (dim >= num_classes) {
    for (int k = 0; k < num_classes; ++k) centres(k, k) = radius;
  } else {
    RandomStream rs = data_stream(seed, rngchan::kServer, 1);
    for (int k = 0; k < num_classes; ++k) {
      Vector dir(dim);
      for (int j = 0; j < dim; ++j) dir[j] = rs.normal();
      centres.row(k) = radius * dir.normalized().transpose();
    }
  }
  Dataset data;
  data.num_classes = num_classes;
  data.features.resize(total, dim);
  data.labels.resize(total);
  RandomStream rs = data_stream(seed, rngchan::kServer, 2);
  for (int i = 0; i < total; ++i) {
    const int k = i % num_classes;
    data.labels[i] = k;
    for (int j = 0; j < dim; ++j) data.features(i, j) = centres(k, j) + rs.normal();
  }
  return data;
}

QuadraticProblem gen_quadratic_problem(std::uint64_t seed, const QuadraticSpec& spec) {
  if (spec.dim < 1 || spec.clients < 1 || spec.local_size < 1) {
    throw std::invalid_argument("gen_quadratic_problem: dim, clients, local_size >= 1");
  }
  if (!(spec.lambda > 0.0) || spec.lambda > spec.L) {
    throw std::invalid_argument("gen_quadratic_problem: need 0 < lambda <= L");
  }
  if (spec.heterogeneity < 0.0 || spec.sample_spread < 0.0) {
    throw std::invalid_argument("gen_quadratic_problem: heterogeneity and spread >= 0");
  }
  const int d = spec.dim;
  RandomStream rs = data_stream(seed, rngchan::kServer, 10);

  Vector eigen(d);
  for (int i = 0; i < d; ++i) {
    eigen[i] = d == 1 ? spec.lambda
                      : spec.lambda + (spec.L - spec.lambda) * i / (d - 1.0);
  }
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rs, d, d, 1.0));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  Matrix a = q * eigen.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());

  Vector centre(d);
  for (int i = 0; i < d; ++i) centre[i] = rs.normal();

  QuadraticProblem problem;
  for (int n = 0; n < spec.clients; ++n) {
    RandomStream cs = data_stream(seed, static_cast<std::uint64_t>(n), 11);
    Vector u(d);
    for (int i = 0; i < d; ++i) u[i] = cs.normal();
    problem.A.push_back(a);
    problem.b.push_back(centre + spec.heterogeneity * u);
    if (spec.local_size > 1) {
      Matrix off = gaussian_matrix(cs, spec.local_size, d, spec.sample_spread);
      off.rowwise() -= off.colwise().mean();
      problem.offsets.push_back(std::move(off));
    }
  }
  return problem;
}

QuadraticProblem gen_quadratic_problem(std::uint64_t seed, int dim, int clients,
                                       double lambda, double L,
                                       double heterogeneity) {
  QuadraticSpec spec;
  spec.dim = dim;
  spec.clients = clients;
  spec.lambda = lambda;
  spec.L = L;
  spec.heterogeneity = heterogeneity;
  return gen_quadratic_problem(seed, spec);
}

Dataset slice(const Dataset& data, int begin, int end) {
  if (begin < 0 || end > data.size() || begin >= end) {
    throw std::invalid_argument("slice: invalid row range");
  }
  Dataset out;
  out.num_classes = data.num_classes;
  out.features = data.features.middleRows(begin, end - begin);
  out.labels.assign(data.labels.begin() + begin, data.labels.begin() + end);
  return out;
}

std::vector<ClientShard> partition_dirichlet(const Dataset& data, int clients,
                                             double dir_alpha, int local_size,
                                             RandomStream& stream) {
  if (clients < 1 || local_size < 1) {
    throw std::invalid_argument("partition_dirichlet: clients and M must be >= 1");
  }
  if (!(dir_alpha > 0.0)) {
    throw std::invalid_argument("partition_dirichlet: dir_alpha must be > 0");
  }
  if (static_cast<long long>(clients) * local_size > data.size()) {
    throw std::invalid_argument("partition_dirichlet: N * M exceeds M_total");
  }
  const int k = data.num_classes;
  std::vector<std::vector<int>> pools(k);
  for (int i = 0; i < data.size(); ++i) pools[data.labels[i]].push_back(i);
  for (auto& pool : pools) shuffle_in_place(pool, stream);
  std::vector<std::size_t> cursor(k, 0);
  auto remaining = [&](int c) { return pools[c].size() - cursor[c]; };

  std::vector<ClientShard> shards(clients);
  for (int n = 0; n < clients; ++n) {
    ClientShard& shard = shards[n];
    shard.client_id = n;
    std::vector<double> p(k);
    double total = 0.0;
    for (double& v : p) {
      v = stream.gamma(dir_alpha, 1.0);
      total += v;
    }
    if (total > 0.0) {
      for (double& v : p) v /= total;
    } else {
      // Every gamma draw underflowed: put all mass on one class.
      std::fill(p.begin(), p.end(), 0.0);
      p[stream.below(k)] = 1.0;
    }
    shard.proportions = p;

    const std::vector<int> want = apportion(p, local_size);
    int deficit = 0;
    for (int c = 0; c < k; ++c) {
      const int take = static_cast<int>(
          std::min<std::size_t>(static_cast<std::size_t>(want[c]), remaining(c)));
      for (int j = 0; j < take; ++j) shard.indices.push_back(pools[c][cursor[c]++]);
      deficit += want[c] - take;
    }
    shard.substituted = deficit;
    while (deficit > 0) {
      int richest = 0;
      for (int c = 1; c < k; ++c) {
        if (remaining(c) > remaining(richest)) richest = c;
      }
      shard.indices.push_back(pools[richest][cursor[richest]++]);
      --deficit;
    }
  }
  return shards;
}

std::vector<int> shard_labels(const ClientShard& shard, const Dataset& data) {
  std::vector<int> labels;
  labels.reserve(shard.indices.size());
  for (int i : shard.indices) labels.push_back(data.labels[i]);
  return labels;
}

int malicious_count(double rho, int clients) {
  if (rho < 0.0 || rho > 1.0) {
    throw std::invalid_argument("malicious fraction rho must lie in [0, 1]");
  }
  // Guard against 0.3 * 10 = 3.0000000000000004 rounding up to 4.
  return static_cast<int>(std::ceil(rho * clients - 1e-9));
}

std::vector<int> apply_noisy_label_attack(const ClientShard& shard,
                                          const Dataset& data, double noise_level,
                                          RandomStream& stream) {
  if (noise_level < 0.0 || noise_level > 1.0) {
    throw std::invalid_argument("noise_level must lie in [0, 1]");
  }
  std::vector<int> labels = shard_labels(shard, data);
  if (noise_level == 0.0 || labels.empty()) return labels;
  const double rate = noise_level * stream.uniform();
  const auto count = static_cast<std::size_t>(std::llround(rate * labels.size()));
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` positions are a uniform subset.
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(order[i], order[i + stream.below(order.size() - i)]);
    labels[order[i]] = static_cast<int>(stream.below(data.num_classes));
  }
  return labels;
}

std::vector<int> flip_labels(std::vector<int> labels, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("class flip needs K >= 2");
  for (int& y : labels) y = (num_classes - 1) - y;
  return labels;
}

std::vector<int> apply_class_flip_attack(const ClientShard& shard,
                                         const Dataset& data, int num_classes) {
  return flip_labels(shard_labels(shard, data), num_classes);
}

Dataset load_csv_dataset(const std::string& path, const CsvSchema& schema) {
  if (schema.dim < 1 || schema.num_classes < 2) {
    throw std::invalid_argument("CSV schema needs dim >= 1 and num_classes >= 2");
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing header row");

  std::vector<double> values;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (static_cast<int>(cells.size()) != schema.dim + 1) {
      throw DataError(where + ": expected " + std::to_string(schema.dim + 1) +
                      " columns, found " + std::to_string(cells.size()));
    }
    for (int j = 0; j < schema.dim; ++j) {
      double v = 0.0;
      const auto cell = cells[j];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError(where + ": non-numeric feature '" + std::string(cell) + "'");
      }
      values.push_back(v);
    }
    long long y = 0;
    const auto cell = cells.back();
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), y);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw DataError(where + ": non-integer label '" + std::string(cell) + "'");
    }
    try {
      labels.push_back(validated_label(y, schema.num_classes));
    } catch (const DataError& e) {
      throw DataError(where + ": schema error: " + e.what());
    }
  }
  if (labels.empty()) throw DataError(path + ": no data rows");

  Dataset data;
  data.num_classes = schema.num_classes;
  data.labels = std::move(labels);
  data.features.resize(data.size(), schema.dim);
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < schema.dim; ++j) data.features(i, j) = values[i * schema.dim + j];
  }
  return data;
}

void write_csv_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (int j = 0; j < data.dim(); ++j) out << 'x' << j << ',';
  out << "label\n";
  char buf[32];
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < data.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features(i, j));
      out << buf << ',';
    }
    out << data.labels[i] << '\n';
  }
}

}  // namespace otafl::datamod
