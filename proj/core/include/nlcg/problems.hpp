// Copyright 2026 The nlcg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NLCG_PROBLEMS_HPP_
#define NLCG_PROBLEMS_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "nlcg/dataset.hpp"
#include "nlcg/numerics.hpp"

namespace nlcg {

enum class ProblemKind { quadratic, logistic_regression, mlp };

std::string_view to_string(ProblemKind kind) noexcept;

/// Mini-batch mean loss and its exact gradient.
struct BatchEval {
  double loss = 0.0;
  ParamVector gradient;
};

/**
 * A differentiable finite-sum objective L(w) = mean over samples of l(x, w).
 *
 * evaluate() validates its arguments and the finiteness of the result, then
 * defers to evaluate_batch(). Implementations are immutable after
 * construction, so evaluate() may be called concurrently.
 */
class Problem {
 public:
  virtual ~Problem() = default;

  virtual ProblemKind kind() const noexcept = 0;
  virtual std::size_t weight_count() const noexcept = 0;
  virtual std::size_t sample_count() const noexcept = 0;

  /// Deterministic starting point for training.
  virtual ParamVector initial_weights(std::uint64_t seed) const = 0;

  BatchEval evaluate(const ParamVector& weights,
                     std::span<const std::size_t> batch) const;

  /// Evaluates the mean over every sample.
  BatchEval evaluate_all(const ParamVector& weights) const;

 protected:
  virtual BatchEval evaluate_batch(const ParamVector& weights,
                                   std::span<const std::size_t> batch) const = 0;
};

/// Free-function spelling of Problem::evaluate.
inline BatchEval evaluate(const Problem& problem, const ParamVector& weights,
                          std::span<const std::size_t> batch) {
  return problem.evaluate(weights, batch);
}

enum class Spectrum {
  /// Eigenvalues evenly spaced on [1/condition, 1].
  linear,
  /// Eigenvalues in geometric progression from 1/condition to 1.
  geometric,
};

struct QuadraticOptions {
  Spectrum spectrum = Spectrum::linear;
  /// Number of samples in the finite sum. Samples share the matrix and
  /// differ only in their linear term.
  std::size_t samples = 1;
  /// Standard deviation of the per-sample perturbation of the linear term.
  double noise = 0.0;
};

/**
 * f(w) = 1/2 w^T A w - b_B^T w, where b_B is the mean of the per-sample
 * linear terms over the batch. The full-batch linear term is b.
 */
class QuadraticProblem final : public Problem {
 public:
  /// Throws ConfigError unless `matrix` is symmetric positive definite.
  QuadraticProblem(Eigen::MatrixXd matrix, Eigen::VectorXd linear_term);
  /// `sample_terms` holds one linear term per column; its column mean is b.
  QuadraticProblem(Eigen::MatrixXd matrix, Eigen::MatrixXd sample_terms);

  ProblemKind kind() const noexcept override { return ProblemKind::quadratic; }
  std::size_t weight_count() const noexcept override;
  std::size_t sample_count() const noexcept override;
  ParamVector initial_weights(std::uint64_t seed) const override;

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& linear_term() const noexcept { return linear_term_; }

  /// A v, exactly.
  ParamVector hessian_vector(const ParamVector& v) const;

  /// Full-batch minimizer A^{-1} b from a Cholesky solve.
  const ParamVector& optimum() const noexcept { return optimum_; }
  double optimal_value() const noexcept { return optimal_value_; }

  /// Full-batch objective value.
  double value(const ParamVector& weights) const;

 protected:
  BatchEval evaluate_batch(const ParamVector& weights,
                           std::span<const std::size_t> batch) const override;

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd sample_terms_;
  Eigen::VectorXd linear_term_;
  ParamVector optimum_;
  double optimal_value_ = 0.0;
};

/// Random SPD quadratic with eigenvalues spanning [1/condition, 1] in a
/// random orthogonal basis. b = A w_ref for a standard normal w_ref.
std::shared_ptr<QuadraticProblem> make_quadratic(std::size_t n,
                                                 double condition_number,
                                                 std::uint64_t seed,
                                                 QuadraticOptions options = {});

/// Same as make_quadratic but with A diagonal (eigenvalues randomly permuted
/// along the axes). Defaults to a geometric spectrum.
std::shared_ptr<QuadraticProblem> make_diagonal_quadratic(
    std::size_t n, double condition_number, std::uint64_t seed,
    QuadraticOptions options = {.spectrum = Spectrum::geometric});

/**
 * Fully-connected classifier: tanh hidden layers, softmax cross-entropy
 * output. With no hidden layers this is multinomial logistic regression.
 *
 * Weights are laid out layer by layer; each layer stores its (out x in)
 * weight matrix row-major followed by its `out` biases.
 */
class SoftmaxNetwork final : public Problem {
 public:
  /// `layer_sizes` runs from feature_dim to num_classes inclusive.
  SoftmaxNetwork(std::shared_ptr<const Dataset> data,
                 std::vector<std::size_t> layer_sizes);

  ProblemKind kind() const noexcept override;
  std::size_t weight_count() const noexcept override { return weight_count_; }
  std::size_t sample_count() const noexcept override;
  ParamVector initial_weights(std::uint64_t seed) const override;

  const Dataset& dataset() const noexcept { return *data_; }
  const std::vector<std::size_t>& layer_sizes() const noexcept {
    return layer_sizes_;
  }

  /// Class scores (logits), one row per sample of `data`.
  Eigen::MatrixXd class_scores(const ParamVector& weights,
                               const Dataset& data) const;

 protected:
  BatchEval evaluate_batch(const ParamVector& weights,
                           std::span<const std::size_t> batch) const override;

 private:
  std::shared_ptr<const Dataset> data_;
  std::vector<std::size_t> layer_sizes_;
  std::vector<std::size_t> layer_offsets_;
  std::size_t weight_count_ = 0;
};

std::shared_ptr<SoftmaxNetwork> make_logistic_regression(
    std::shared_ptr<const Dataset> data);

/// `hidden` lists hidden-layer widths; input and output widths come from the
/// dataset.
std::shared_ptr<SoftmaxNetwork> make_mlp(std::shared_ptr<const Dataset> data,
                                         const std::vector<std::size_t>& hidden);

/// Fraction of samples whose highest-scoring class equals the label, ties
/// resolved toward the lowest class id. Throws UnsupportedOperation for
/// non-classification problems.
double accuracy(const Problem& problem, const ParamVector& weights,
                const Dataset& dataset);

/// Indices 0..n-1.
std::vector<std::size_t> all_indices(std::size_t n);

}  // namespace nlcg

#endif  // NLCG_PROBLEMS_HPP_
