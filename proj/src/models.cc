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

#include "otafl/models.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace otafl::models {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Softmax cross-entropy over (row, label) pairs produced by `sample(j)` for
// j in [0, count). Returns the mean loss and, when `g` is non-null, writes the
// mean gradient. Regularisation is added by the caller.
template <typename SampleFn>
double softmax_batch(const ModelSpec& spec, const Vector& w, const Matrix& features,
                     int count, SampleFn sample, Vector* g) {
  const int k = spec.num_classes;
  const int p = spec.feature_dim;
  Eigen::Map<const RowMajor> weights(w.data(), k, p + 1);
  Vector z(k);
  Vector x(p);
  RowMajor acc;
  if (g != nullptr) acc = RowMajor::Zero(k, p + 1);
  double total = 0.0;
  for (int j = 0; j < count; ++j) {
    const auto [row, label] = sample(j);
    x = features.row(row).transpose();
    z = weights.leftCols(p) * x + weights.col(p);
    const double zmax = z.maxCoeff();
    const double log_norm = zmax + std::log((z.array() - zmax).exp().sum());
    total += log_norm - z[label];
    if (g != nullptr) {
      Vector prob = (z.array() - log_norm).exp();
      prob[label] -= 1.0;
      acc.leftCols(p).noalias() += prob * x.transpose();
      acc.col(p) += prob;
    }
  }
  if (g != nullptr) {
    *g = Eigen::Map<const Vector>(acc.data(), acc.size()) / count;
  }
  return total / count;
}

void check_logistic_spec(const ModelSpec& spec, const Vector& w) {
  if (spec.kind != ModelKind::kMultinomialLogistic) {
    throw std::invalid_argument("expected a multinomial logistic spec");
  }
  if (w.size() != spec.param_dim()) {
    throw std::invalid_argument("parameter dimension " + std::to_string(w.size()) +
                                " != K * (p + 1) = " + std::to_string(spec.param_dim()));
  }
}

Curvature quadratic_curvature(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().maxCoeff(), eig.eigenvalues().minCoeff()};
}

double logistic_smoothness(const ModelSpec& spec, const datamod::Dataset& data,
                           std::span<const int> indices) {
  const int p = spec.feature_dim;
  Matrix gram = Matrix::Zero(p + 1, p + 1);
  Vector x(p + 1);
  for (int i : indices) {
    x.head(p) = data.features.row(i).transpose();
    x[p] = 1.0;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  gram /= static_cast<double>(indices.size());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().maxCoeff() + spec.l2_reg;
}

}  // namespace

std::vector<int> iota_positions(int count) {
  std::vector<int> out(static_cast<std::size_t>(count));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

double Objective::full_loss(const Vector& w) const {
  const auto all = iota_positions(size());
  return loss(w, all);
}

Vector Objective::full_grad(const Vector& w) const {
  const auto all = iota_positions(size());
  return grad(w, all);
}

QuadraticObjective::QuadraticObjective(Matrix A, Vector b, Matrix offsets)
    : a_(std::move(A)), b_(std::move(b)), offsets_(std::move(offsets)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw std::invalid_argument("QuadraticObjective: A must be d x d and b length d");
  }
  if (offsets_.size() != 0 && offsets_.cols() != b_.size()) {
    throw std::invalid_argument("QuadraticObjective: offsets must have d columns");
  }
  curvature_ = quadratic_curvature(a_);
}

Vector QuadraticObjective::batch_linear_term(std::span<const int> batch) const {
  if (offsets_.rows() == 0) return b_;
  Vector mean = Vector::Zero(b_.size());
  for (int i : batch) mean += offsets_.row(i).transpose();
  return b_ + mean / static_cast<double>(batch.size());
}

double QuadraticObjective::loss(const Vector& w, std::span<const int> batch) const {
  return 0.5 * w.dot(a_ * w) - batch_linear_term(batch).dot(w);
}

Vector QuadraticObjective::grad(const Vector& w, std::span<const int> batch) const {
  if (batch.empty()) throw std::invalid_argument("grad: empty batch");
  return a_ * w - batch_linear_term(batch);
}

LogisticObjective::LogisticObjective(ModelSpec spec,
                                     std::shared_ptr<const datamod::Dataset> data,
                                     std::vector<int> rows, std::vector<int> labels)
    : spec_(spec), data_(std::move(data)), rows_(std::move(rows)),
      labels_(std::move(labels)) {
  if (rows_.empty() || rows_.size() != labels_.size()) {
    throw std::invalid_argument("LogisticObjective: rows and labels must agree");
  }
  if (data_->dim() != spec_.feature_dim) {
    throw std::invalid_argument("LogisticObjective: feature dimension mismatch");
  }
  for (int y : labels_) {
    if (y < 0 || y >= spec_.num_classes) {
      throw std::invalid_argument("LogisticObjective: label out of range");
    }
  }
  curvature_ = {logistic_smoothness(spec_, *data_, rows_), spec_.l2_reg};
}

double LogisticObjective::loss(const Vector& w, std::span<const int> batch) const {
  check_logistic_spec(spec_, w);
  const double ce = softmax_batch(
      spec_, w, data_->features, static_cast<int>(batch.size()),
      [&](int j) { return std::pair{rows_[batch[j]], labels_[batch[j]]}; }, nullptr);
  return ce + 0.5 * spec_.l2_reg * w.squaredNorm();
}

Vector LogisticObjective::grad(const Vector& w, std::span<const int> batch) const {
  check_logistic_spec(spec_, w);
  if (batch.empty()) throw std::invalid_argument("grad: empty batch");
  Vector g;
  softmax_batch(
      spec_, w, data_->features, static_cast<int>(batch.size()),
      [&](int j) { return std::pair{rows_[batch[j]], labels_[batch[j]]}; }, &g);
  return g + spec_.l2_reg * w;
}

AverageObjective::AverageObjective(std::vector<ObjectivePtr> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("AverageObjective: no parts");
  part_size_ = parts_.front()->size();
  for (const auto& part : parts_) {
    if (part->size() != part_size_ || part->dim() != parts_.front()->dim()) {
      throw std::invalid_argument("AverageObjective: parts must have equal size and dim");
    }
  }
}

double AverageObjective::loss(const Vector& w, std::span<const int> batch) const {
  if (static_cast<int>(batch.size()) == size()) return mean_loss(w);
  double total = 0.0;
  for (int pos : batch) {
    const int one[] = {pos % part_size_};
    total += parts_[pos / part_size_]->loss(w, one);
  }
  return total / static_cast<double>(batch.size());
}

Vector AverageObjective::grad(const Vector& w, std::span<const int> batch) const {
  if (batch.empty()) throw std::invalid_argument("grad: empty batch");
  if (static_cast<int>(batch.size()) == size()) return mean_grad(w);
  Vector g = Vector::Zero(dim());
  for (int pos : batch) {
    const int one[] = {pos % part_size_};
    g += parts_[pos / part_size_]->grad(w, one);
  }
  return g / static_cast<double>(batch.size());
}

double AverageObjective::mean_loss(const Vector& w) const {
  double total = 0.0;
  for (const auto& part : parts_) total += part->full_loss(w);
  return total / static_cast<double>(parts_.size());
}

Vector AverageObjective::mean_grad(const Vector& w) const {
  Vector g = Vector::Zero(dim());
  for (const auto& part : parts_) g += part->full_grad(w);
  return g / static_cast<double>(parts_.size());
}

Curvature AverageObjective::curvature() const {
  Curvature c = parts_.front()->curvature();
  for (const auto& part : parts_) {
    c.L = std::max(c.L, part->curvature().L);
    c.lambda = std::min(c.lambda, part->curvature().lambda);
  }
  return c;
}

std::optional<QuadraticForm> AverageObjective::quadratic_form() const {
  QuadraticForm sum{Matrix::Zero(dim(), dim()), Vector::Zero(dim())};
  for (const auto& part : parts_) {
    auto form = part->quadratic_form();
    if (!form) return std::nullopt;
    sum.A += form->A;
    sum.b += form->b;
  }
  const double n = static_cast<double>(parts_.size());
  return QuadraticForm{sum.A / n, sum.b / n};
}

double loss(const ModelSpec& spec, const Vector& w, const datamod::Dataset& data,
            std::span<const int> indices) {
  check_logistic_spec(spec, w);
  const double ce = softmax_batch(
      spec, w, data.features, static_cast<int>(indices.size()),
      [&](int j) { return std::pair{indices[j], data.labels[indices[j]]}; }, nullptr);
  return ce + 0.5 * spec.l2_reg * w.squaredNorm();
}

Vector grad(const ModelSpec& spec, const Vector& w, const datamod::Dataset& data,
            std::span<const int> indices) {
  check_logistic_spec(spec, w);
  if (indices.empty()) throw std::invalid_argument("grad: empty index set");
  Vector g;
  softmax_batch(
      spec, w, data.features, static_cast<int>(indices.size()),
      [&](int j) { return std::pair{indices[j], data.labels[indices[j]]}; }, &g);
  return g + spec.l2_reg * w;
}

Curvature constants(const ModelSpec& spec, const datamod::Dataset& data,
                    std::span<const int> indices) {
  if (indices.empty()) throw std::invalid_argument("constants: empty index set");
  return {logistic_smoothness(spec, data, indices), spec.l2_reg};
}

Curvature constants(const datamod::QuadraticProblem& problem) {
  if (problem.num_clients() == 0) throw std::invalid_argument("constants: empty problem");
  Curvature c = quadratic_curvature(problem.A.front());
  for (const auto& a : problem.A) {
    const Curvature ci = quadratic_curvature(a);
    c.L = std::max(c.L, ci.L);
    c.lambda = std::min(c.lambda, ci.lambda);
  }
  return c;
}

std::vector<int> predict(const ModelSpec& spec, const Vector& w,
                         const datamod::Dataset& data) {
  check_logistic_spec(spec, w);
  const int p = spec.feature_dim;
  Eigen::Map<const RowMajor> weights(w.data(), spec.num_classes, p + 1);
  const Matrix scores =
      (data.features * weights.leftCols(p).transpose()).rowwise() +
      weights.col(p).transpose();
  std::vector<int> out(static_cast<std::size_t>(data.size()));
  for (int i = 0; i < data.size(); ++i) scores.row(i).maxCoeff(&out[i]);
  return out;
}

double accuracy(const ModelSpec& spec, const Vector& w, const datamod::Dataset& data) {
  const auto pred = predict(spec, w, data);
  int hits = 0;
  for (int i = 0; i < data.size(); ++i) hits += pred[i] == data.labels[i];
  return static_cast<double>(hits) / data.size();
}

std::vector<ObjectivePtr> make_quadratic_clients(const datamod::QuadraticProblem& problem) {
  std::vector<ObjectivePtr> out;
  for (int n = 0; n < problem.num_clients(); ++n) {
    Matrix off = problem.offsets.empty() ? Matrix() : problem.offsets[n];
    out.push_back(std::make_shared<QuadraticObjective>(problem.A[n], problem.b[n],
                                                       std::move(off)));
  }
  return out;
}

std::vector<ObjectivePtr> make_logistic_clients(
    const ModelSpec& spec, std::shared_ptr<const datamod::Dataset> data,
    const std::vector<datamod::ClientShard>& shards,
    const std::vector<std::vector<int>>& labels) {
  std::vector<ObjectivePtr> out;
  for (std::size_t n = 0; n < shards.size(); ++n) {
    std::vector<int> y = n < labels.size() && !labels[n].empty()
                             ? labels[n]
                             : datamod::shard_labels(shards[n], *data);
    out.push_back(std::make_shared<LogisticObjective>(spec, data, shards[n].indices,
                                                      std::move(y)));
  }
  return out;
}

Minimum local_minimize(const Objective& objective, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("local_minimize: tol must be > 0");
  if (auto form = objective.quadratic_form()) {
    Minimum m;
    m.w = form->A.ldlt().solve(form->b);
    m.value = objective.full_loss(m.w);
    m.grad_norm = objective.full_grad(m.w).norm();
    return m;
  }
  const Curvature c = objective.curvature();
  if (!(c.lambda > 0.0)) {
    throw std::invalid_argument("local_minimize: objective is not strongly convex");
  }
  // Nesterov's constant-momentum scheme for lambda-strongly convex, L-smooth f.
  const double root_kappa = std::sqrt(c.L / c.lambda);
  const double momentum = (root_kappa - 1.0) / (root_kappa + 1.0);
  Vector x = Vector::Zero(objective.dim());
  Vector prev = x;
  double last_norm = 0.0;
  for (int it = 0; it < kMinimizeIterationCap; ++it) {
    const Vector y = x + momentum * (x - prev);
    const Vector g = objective.full_grad(y);
    last_norm = g.norm();
    if (last_norm <= tol) {
      return {y, objective.full_loss(y), last_norm, it};
    }
    prev = std::move(x);
    x = y - g / c.L;
  }
  throw MinimizeError("local_minimize: no convergence within iteration cap; last "
                      "gradient norm " + std::to_string(last_norm),
                      last_norm);
}

}  // namespace otafl::models
