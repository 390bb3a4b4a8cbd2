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

#ifndef OTAFL_MODELS_H_
#define OTAFL_MODELS_H_

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "otafl/datamod.h"
#include "otafl/types.h"

// Loss and gradient oracles whose smoothness and convexity constants are known,
// so simulated runs can be compared against the bound evaluators.
namespace otafl::models {

enum class ModelKind { kQuadratic, kMultinomialLogistic };

struct ModelSpec {
  ModelKind kind = ModelKind::kMultinomialLogistic;
  int feature_dim = 1;  // logistic only
  int num_classes = 2;  // logistic only
  double l2_reg = 0.0;  // logistic only

  // Flattened parameter dimension: K * (feature_dim + 1) for logistic.
  int param_dim() const { return num_classes * (feature_dim + 1); }
};

struct Curvature {
  double L = 0.0;       // smoothness
  double lambda = 0.0;  // strong convexity (0 when unknown / non-convex)
};

// Bundle of assumption constants consumed by the bound evaluators.
struct AssumptionConstants {
  double L = 0.0;
  double lambda = 0.0;
  std::vector<double> sigma_s_sq;
  std::vector<double> G_sq;
  double Gamma = 0.0;
};

// 0.5 w'Aw - b'w (+ constant) representation of a full loss.
struct QuadraticForm {
  Matrix A;
  Vector b;
};

// One client's empirical risk over `size()` samples addressed by local
// position 0..size()-1.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual int size() const = 0;
  // Mean per-sample loss over `batch`.
  virtual double loss(const Vector& w, std::span<const int> batch) const = 0;
  // Mean per-sample gradient over `batch` (non-empty).
  virtual Vector grad(const Vector& w, std::span<const int> batch) const = 0;
  virtual Curvature curvature() const = 0;
  virtual std::optional<QuadraticForm> quadratic_form() const { return std::nullopt; }

  double full_loss(const Vector& w) const;
  Vector full_grad(const Vector& w) const;
};

// 0, 1, ..., count - 1.
std::vector<int> iota_positions(int count);

using ObjectivePtr = std::shared_ptr<const Objective>;

class QuadraticObjective final : public Objective {
 public:
  // `offsets` is M x d with zero column means, or empty for a single sample.
  QuadraticObjective(Matrix A, Vector b, Matrix offsets = Matrix());

  int dim() const override { return static_cast<int>(b_.size()); }
  int size() const override { return offsets_.rows() == 0 ? 1 : static_cast<int>(offsets_.rows()); }
  double loss(const Vector& w, std::span<const int> batch) const override;
  Vector grad(const Vector& w, std::span<const int> batch) const override;
  Curvature curvature() const override { return curvature_; }
  std::optional<QuadraticForm> quadratic_form() const override {
    return QuadraticForm{a_, b_};
  }

  const Matrix& A() const { return a_; }
  const Vector& b() const { return b_; }

 private:
  Vector batch_linear_term(std::span<const int> batch) const;

  Matrix a_;
  Vector b_;
  Matrix offsets_;
  Curvature curvature_;
};

// Softmax cross-entropy over selected rows plus (l2_reg / 2)||w||^2.
// Parameters are a row-major K x (p + 1) matrix with the bias last.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(ModelSpec spec, std::shared_ptr<const datamod::Dataset> data,
                    std::vector<int> rows, std::vector<int> labels);

  int dim() const override { return spec_.param_dim(); }
  int size() const override { return static_cast<int>(rows_.size()); }
  double loss(const Vector& w, std::span<const int> batch) const override;
  Vector grad(const Vector& w, std::span<const int> batch) const override;
  Curvature curvature() const override { return curvature_; }

  const ModelSpec& spec() const { return spec_; }

 private:
  ModelSpec spec_;
  std::shared_ptr<const datamod::Dataset> data_;
  std::vector<int> rows_;
  std::vector<int> labels_;
  Curvature curvature_;
};

// f(w) = (1/N) sum_n f_n(w) over equal-size parts. Position p addresses sample
// p % M of part p / M, so a full batch is the mean over all N * M samples.
class AverageObjective final : public Objective {
 public:
  explicit AverageObjective(std::vector<ObjectivePtr> parts);

  int dim() const override { return parts_.front()->dim(); }
  int size() const override { return static_cast<int>(parts_.size()) * part_size_; }
  double loss(const Vector& w, std::span<const int> batch) const override;
  Vector grad(const Vector& w, std::span<const int> batch) const override;
  Curvature curvature() const override;
  std::optional<QuadraticForm> quadratic_form() const override;

  double mean_loss(const Vector& w) const;
  Vector mean_grad(const Vector& w) const;

 private:
  std::vector<ObjectivePtr> parts_;
  int part_size_;
};

double loss(const ModelSpec& spec, const Vector& w, const datamod::Dataset& data,
            std::span<const int> indices);
Vector grad(const ModelSpec& spec, const Vector& w, const datamod::Dataset& data,
            std::span<const int> indices);

// Logistic: L = 0.5 lambda_max((1/M) X'X) + l2_reg with a bias column,
// lambda = l2_reg.
Curvature constants(const ModelSpec& spec, const datamod::Dataset& data,
                    std::span<const int> indices);
// Quadratic: extreme eigenvalues over every client's A_n.
Curvature constants(const datamod::QuadraticProblem& problem);

// Predicted class for each row (logistic parameters).
std::vector<int> predict(const ModelSpec& spec, const Vector& w,
                         const datamod::Dataset& data);
double accuracy(const ModelSpec& spec, const Vector& w, const datamod::Dataset& data);

std::vector<ObjectivePtr> make_quadratic_clients(const datamod::QuadraticProblem& problem);
// `labels[n]`, when non-empty, overrides shard n's labels (attacks).
std::vector<ObjectivePtr> make_logistic_clients(
    const ModelSpec& spec, std::shared_ptr<const datamod::Dataset> data,
    const std::vector<datamod::ClientShard>& shards,
    const std::vector<std::vector<int>>& labels = {});

class MinimizeError : public std::runtime_error {
 public:
  MinimizeError(const std::string& what, double last_grad_norm)
      : std::runtime_error(what), last_grad_norm_(last_grad_norm) {}
  double last_grad_norm() const { return last_grad_norm_; }

 private:
  double last_grad_norm_;
};

struct Minimum {
  Vector w;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

inline constexpr int kMinimizeIterationCap = 100000;

// Quadratics are solved exactly; other objectives need curvature().lambda > 0
// and use accelerated gradient descent with step 1/L until ||grad|| <= tol.
Minimum local_minimize(const Objective& objective, double tol);

}  // namespace otafl::models

#endif  // OTAFL_MODELS_H_
