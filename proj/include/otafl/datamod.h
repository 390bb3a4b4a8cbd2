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

#ifndef OTAFL_DATAMOD_H_
#define OTAFL_DATAMOD_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "otafl/rngchan.h"
#include "otafl/types.h"

namespace otafl::datamod {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Classification samples, one row per sample.
struct Dataset {
  Matrix features;  // M_total x d
  std::vector<int> labels;
  int num_classes = 0;

  int size() const { return static_cast<int>(labels.size()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

struct ClientShard {
  int client_id = 0;
  std::vector<int> indices;  // rows of the parent Dataset
  // Class proportions drawn for this client.
  std::vector<double> proportions;
  // Samples taken from a surplus class because the drawn class ran dry.
  int substituted = 0;

  int size() const { return static_cast<int>(indices.size()); }
};

// Per-client local objectives f_n(w) = (1/M) sum_i [0.5 w'A_n w - b_{n,i}'w]
// with b_{n,i} = b_n + offset_{n,i}; offsets are zero-mean per client, so
// the full local loss is 0.5 w'A_n w - b_n'w and per-sample offsets give the
// mini-batch gradient noise.
struct QuadraticProblem {
  std::vector<Matrix> A;
  std::vector<Vector> b;
  std::vector<Matrix> offsets;  // M x d each; empty means M = 1, no offset

  int num_clients() const { return static_cast<int>(A.size()); }
  int dim() const { return A.empty() ? 0 : static_cast<int>(A.front().rows()); }
  int local_size() const {
    return offsets.empty() ? 1 : static_cast<int>(offsets.front().rows());
  }
};

struct QuadraticSpec {
  int dim = 2;
  int clients = 2;
  double lambda = 1.0;
  double L = 1.0;
  // Scales the dispersion of b_n around a common centre; 0 gives identical
  // clients.
  double heterogeneity = 0.0;
  int local_size = 1;
  // Standard deviation of the per-sample linear-term offsets.
  double sample_spread = 0.0;
};

// Gaussian class clusters; centres sit at pairwise distance `separation`
// (exactly when d >= K). Label of row i is i mod K.
Dataset gen_synthetic_classification(std::uint64_t seed, int dim, int num_classes,
                                     int total, double separation);

QuadraticProblem gen_quadratic_problem(std::uint64_t seed, const QuadraticSpec& spec);
QuadraticProblem gen_quadratic_problem(std::uint64_t seed, int dim, int clients,
                                       double lambda, double L,
                                       double heterogeneity);

// Rows [begin, end) of `data` as a new dataset.
Dataset slice(const Dataset& data, int begin, int end);

// Equal-size non-i.i.d. shards: class proportions ~ Dir(alpha 1_K), rounded to
// exactly `local_size` samples, deficits refilled from surplus classes.
std::vector<ClientShard> partition_dirichlet(const Dataset& data, int clients,
                                             double dir_alpha, int local_size,
                                             rngchan::RandomStream& stream);

std::vector<int> shard_labels(const ClientShard& shard, const Dataset& data);

// Malicious clients are indices [0, malicious_count(rho, N)).
int malicious_count(double rho, int clients);

// Draws a rate r ~ U[0, noise_level] and replaces round(r M) labels, chosen
// without replacement, with uniform random labels.
std::vector<int> apply_noisy_label_attack(const ClientShard& shard,
                                          const Dataset& data, double noise_level,
                                          rngchan::RandomStream& stream);

// Label i becomes (K - 1) - i.
std::vector<int> apply_class_flip_attack(const ClientShard& shard,
                                         const Dataset& data, int num_classes);
std::vector<int> flip_labels(std::vector<int> labels, int num_classes);

struct CsvSchema {
  int dim = 0;
  int num_classes = 0;
};

// Header row, `dim` feature columns, then one integer label column.
Dataset load_csv_dataset(const std::string& path, const CsvSchema& schema);
void write_csv_dataset(const std::string& path, const Dataset& data);

}  // namespace otafl::datamod

#endif  // OTAFL_DATAMOD_H_
