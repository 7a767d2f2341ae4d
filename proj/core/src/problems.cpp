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

#include "nlcg/problems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "nlcg/errors.hpp"

namespace nlcg {

std::string_view to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::quadratic:
      return "quadratic";
    case ProblemKind::logistic_regression:
      return "logistic_regression";
    case ProblemKind::mlp:
      return "mlp";
  }
  return "unknown";
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

BatchEval Problem::evaluate(const ParamVector& weights,
                            std::span<const std::size_t> batch) const {
  if (weights.size() != weight_count()) {
    throw DimensionError("evaluate: expected " + std::to_string(weight_count()) +
                         " weights, got " + std::to_string(weights.size()));
  }
  if (batch.empty()) throw ConfigError("evaluate: empty batch");
  const std::size_t n = sample_count();
  for (const std::size_t i : batch) {
    if (i >= n) {
      throw IndexError("evaluate: sample index " + std::to_string(i) +
                       " out of range (" + std::to_string(n) + " samples)");
    }
  }
  BatchEval out = evaluate_batch(weights, batch);
  if (!std::isfinite(out.loss)) throw NumericError("evaluate: non-finite loss");
  require_finite(out.gradient, "evaluate: gradient");
  return out;
}

BatchEval Problem::evaluate_all(const ParamVector& weights) const {
  const auto idx = all_indices(sample_count());
  return evaluate(weights, idx);
}

// ---------------------------------------------------------------------------
// Quadratic

namespace {

Eigen::VectorXd to_eigen(const ParamVector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

ParamVector from_eigen(const Eigen::VectorXd& v) {
  return ParamVector(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd matrix,
                                   Eigen::VectorXd linear_term)
    : QuadraticProblem(std::move(matrix), Eigen::MatrixXd(linear_term)) {}

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd matrix,
                                   Eigen::MatrixXd sample_terms)
    : matrix_(std::move(matrix)), sample_terms_(std::move(sample_terms)) {
  const Eigen::Index n = matrix_.rows();
  if (n < 1 || matrix_.cols() != n) {
    throw ConfigError("quadratic: matrix must be square and non-empty");
  }
  if (sample_terms_.rows() != n || sample_terms_.cols() < 1) {
    throw DimensionError("quadratic: linear terms do not match the matrix");
  }
  if (!matrix_.allFinite() || !sample_terms_.allFinite()) {
    throw ConfigError("quadratic: non-finite coefficients");
  }
  const double scale = matrix_.cwiseAbs().maxCoeff();
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConfigError("quadratic: matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(matrix_);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("quadratic: matrix is not positive definite");
  }
  linear_term_ = sample_terms_.rowwise().mean();
  const Eigen::VectorXd w_star = llt.solve(linear_term_);
  optimum_ = from_eigen(w_star);
  optimal_value_ = -0.5 * linear_term_.dot(w_star);
}

std::size_t QuadraticProblem::weight_count() const noexcept {
  return static_cast<std::size_t>(matrix_.rows());
}

std::size_t QuadraticProblem::sample_count() const noexcept {
  return static_cast<std::size_t>(sample_terms_.cols());
}

ParamVector QuadraticProblem::initial_weights(std::uint64_t) const {
  return ParamVector::zeros(weight_count());
}

ParamVector QuadraticProblem::hessian_vector(const ParamVector& v) const {
  if (v.size() != weight_count()) {
    throw DimensionError("hessian_vector: length mismatch");
  }
  return from_eigen(matrix_ * to_eigen(v));
}

double QuadraticProblem::value(const ParamVector& weights) const {
  if (weights.size() != weight_count()) {
    throw DimensionError("quadratic value: length mismatch");
  }
  const Eigen::VectorXd w = to_eigen(weights);
  return 0.5 * w.dot(matrix_ * w) - linear_term_.dot(w);
}

BatchEval QuadraticProblem::evaluate_batch(
    const ParamVector& weights, std::span<const std::size_t> batch) const {
  const Eigen::VectorXd w = to_eigen(weights);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(matrix_.rows());
  for (const std::size_t i : batch) {
    b += sample_terms_.col(static_cast<Eigen::Index>(i));
  }
  b /= static_cast<double>(batch.size());
  const Eigen::VectorXd aw = matrix_ * w;
  return {0.5 * w.dot(aw) - b.dot(w), from_eigen(aw - b)};
}

namespace {

Eigen::VectorXd spectrum_values(std::size_t n, double condition,
                                Spectrum spectrum) {
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(n));
  if (n == 1) {
    lambda(0) = 1.0;
    return lambda;
  }
  const double lo = 1.0 / condition;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    lambda(static_cast<Eigen::Index>(i)) =
        spectrum == Spectrum::linear ? lo + (1.0 - lo) * t
                                     : std::pow(condition, t - 1.0);
  }
  lambda(static_cast<Eigen::Index>(n - 1)) = 1.0;
  lambda(0) = lo;
  return lambda;
}

Eigen::MatrixXd sample_terms_for(const Eigen::VectorXd& b,
                                 const QuadraticOptions& options,
                                 std::mt19937_64& rng) {
  if (options.samples < 1) throw ConfigError("quadratic: samples must be >= 1");
  if (!(options.noise >= 0.0)) throw ConfigError("quadratic: noise must be >= 0");
  const auto m = static_cast<Eigen::Index>(options.samples);
  Eigen::MatrixXd terms = b.replicate(1, m);
  if (m > 1 && options.noise > 0.0) {
    std::normal_distribution<double> normal(0.0, options.noise);
    Eigen::MatrixXd noise(b.size(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < b.size(); ++i) noise(i, j) = normal(rng);
    }
    // Centre the perturbations so the full-batch linear term stays b.
    const Eigen::VectorXd mean = noise.rowwise().mean();
    noise.colwise() -= mean;
    terms += noise;
  }
  return terms;
}

void check_quadratic_args(std::size_t n, double condition_number) {
  if (n < 1) throw ConfigError("quadratic: n must be >= 1");
  if (!(condition_number >= 1.0) || !std::isfinite(condition_number)) {
    throw ConfigError("quadratic: condition number must be >= 1");
  }
}

}  // namespace

std::shared_ptr<QuadraticProblem> make_quadratic(std::size_t n,
                                                 double condition_number,
                                                 std::uint64_t seed,
                                                 QuadraticOptions options) {
  check_quadratic_args(n, condition_number);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(n);

  Eigen::MatrixXd gaussian(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) gaussian(i, j) = normal(rng);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian)
                                .householderQ() *
                            Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::VectorXd lambda =
      spectrum_values(n, condition_number, options.spectrum);
  Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose()).eval();

  Eigen::VectorXd w_ref(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w_ref(i) = normal(rng);
  const Eigen::VectorXd b = a * w_ref;
  return std::make_shared<QuadraticProblem>(std::move(a),
                                            sample_terms_for(b, options, rng));
}

std::shared_ptr<QuadraticProblem> make_diagonal_quadratic(
    std::size_t n, double condition_number, std::uint64_t seed,
    QuadraticOptions options) {
  check_quadratic_args(n, condition_number);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(n);

  Eigen::VectorXd lambda =
      spectrum_values(n, condition_number, options.spectrum);
  std::shuffle(lambda.data(), lambda.data() + lambda.size(), rng);

  Eigen::VectorXd w_ref(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w_ref(i) = normal(rng);
  const Eigen::VectorXd b = lambda.cwiseProduct(w_ref);
  Eigen::MatrixXd a = lambda.asDiagonal();
  return std::make_shared<QuadraticProblem>(std::move(a),
                                            sample_terms_for(b, options, rng));
}

// ---------------------------------------------------------------------------
// Softmax networks

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

SoftmaxNetwork::SoftmaxNetwork(std::shared_ptr<const Dataset> data,
                               std::vector<std::size_t> layer_sizes)
    : data_(std::move(data)), layer_sizes_(std::move(layer_sizes)) {
  if (!data_) throw ConfigError("network: null dataset");
  data_->validate();
  if (data_->num_classes < 2) {
    throw ConfigError("network: classification needs at least 2 classes");
  }
  if (layer_sizes_.size() < 2) {
    throw ConfigError("network: need at least input and output layers");
  }
  if (layer_sizes_.front() != data_->feature_dim()) {
    throw ConfigError("network: input width " +
                      std::to_string(layer_sizes_.front()) +
                      " does not match feature dimension " +
                      std::to_string(data_->feature_dim()));
  }
  if (layer_sizes_.back() != static_cast<std::size_t>(data_->num_classes)) {
    throw ConfigError("network: output width does not match class count");
  }
  for (std::size_t l = 1; l < layer_sizes_.size(); ++l) {
    if (layer_sizes_[l] == 0) throw ConfigError("network: empty layer");
    layer_offsets_.push_back(weight_count_);
    weight_count_ += layer_sizes_[l] * (layer_sizes_[l - 1] + 1);
  }
}

ProblemKind SoftmaxNetwork::kind() const noexcept {
  return layer_sizes_.size() == 2 ? ProblemKind::logistic_regression
                                  : ProblemKind::mlp;
}

std::size_t SoftmaxNetwork::sample_count() const noexcept {
  return data_->num_samples();
}

ParamVector SoftmaxNetwork::initial_weights(std::uint64_t seed) const {
  ParamVector w = ParamVector::zeros(weight_count_);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 1; l < layer_sizes_.size(); ++l) {
    const std::size_t fan_in = layer_sizes_[l - 1];
    const std::size_t fan_out = layer_sizes_[l];
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> uniform(-limit, limit);
    const std::size_t offset = layer_offsets_[l - 1];
    for (std::size_t i = 0; i < fan_in * fan_out; ++i) {
      w[offset + i] = uniform(rng);
    }
    // Biases start at zero.
  }
  return w;
}

namespace {

struct LayerView {
  Eigen::Map<const RowMatrix> weights;
  Eigen::Map<const Eigen::VectorXd> bias;
};

LayerView layer_view(const ParamVector& w, std::size_t offset, std::size_t in,
                     std::size_t out) {
  const auto rows = static_cast<Eigen::Index>(out);
  const auto cols = static_cast<Eigen::Index>(in);
  return {Eigen::Map<const RowMatrix>(w.data() + offset, rows, cols),
          Eigen::Map<const Eigen::VectorXd>(w.data() + offset + out * in, rows)};
}

}  // namespace

Eigen::MatrixXd SoftmaxNetwork::class_scores(const ParamVector& weights,
                                             const Dataset& data) const {
  if (weights.size() != weight_count_) {
    throw DimensionError("class_scores: weight length mismatch");
  }
  if (data.feature_dim() != layer_sizes_.front()) {
    throw DimensionError("class_scores: feature dimension mismatch");
  }
  Eigen::MatrixXd act = data.features;
  for (std::size_t l = 1; l < layer_sizes_.size(); ++l) {
    const auto layer = layer_view(weights, layer_offsets_[l - 1],
                                  layer_sizes_[l - 1], layer_sizes_[l]);
    Eigen::MatrixXd z = act * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    if (l + 1 < layer_sizes_.size()) {
      act = z.array().tanh().matrix();
    } else {
      act = std::move(z);
    }
  }
  return act;
}

BatchEval SoftmaxNetwork::evaluate_batch(
    const ParamVector& weights, std::span<const std::size_t> batch) const {
  const auto batch_rows = static_cast<Eigen::Index>(batch.size());
  const std::size_t num_layers = layer_sizes_.size() - 1;

  // activations[0] is the input; activations[l] the output of hidden layer l.
  std::vector<Eigen::MatrixXd> activations(num_layers);
  activations[0].resize(batch_rows, data_->features.cols());
  for (Eigen::Index r = 0; r < batch_rows; ++r) {
    activations[0].row(r) =
        data_->features.row(static_cast<Eigen::Index>(batch[r]));
  }

  Eigen::MatrixXd logits;
  for (std::size_t l = 1; l <= num_layers; ++l) {
    const auto layer = layer_view(weights, layer_offsets_[l - 1],
                                  layer_sizes_[l - 1], layer_sizes_[l]);
    Eigen::MatrixXd z = activations[l - 1] * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    if (l < num_layers) {
      activations[l] = z.array().tanh().matrix();
    } else {
      logits = std::move(z);
    }
  }

  // Softmax cross-entropy with the log-sum-exp shift.
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Eigen::MatrixXd delta(batch_rows, logits.cols());
  for (Eigen::Index r = 0; r < batch_rows; ++r) {
    const double shift = logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(r).array() - shift).exp().matrix();
    const double sum = e.sum();
    const int label = data_->labels[batch[r]];
    loss += shift + std::log(sum) - logits(r, label);
    delta.row(r) = e / sum;
    delta(r, label) -= 1.0;
  }
  loss *= inv_batch;
  delta *= inv_batch;

  ParamVector gradient = ParamVector::zeros(weight_count_);
  for (std::size_t l = num_layers; l >= 1; --l) {
    const std::size_t in = layer_sizes_[l - 1];
    const std::size_t out = layer_sizes_[l];
    const std::size_t offset = layer_offsets_[l - 1];
    Eigen::Map<RowMatrix> grad_w(gradient.data() + offset,
                                 static_cast<Eigen::Index>(out),
                                 static_cast<Eigen::Index>(in));
    Eigen::Map<Eigen::VectorXd> grad_b(gradient.data() + offset + out * in,
                                       static_cast<Eigen::Index>(out));
    grad_w.noalias() = delta.transpose() * activations[l - 1];
    grad_b = delta.colwise().sum().transpose();
    if (l > 1) {
      const auto layer = layer_view(weights, offset, in, out);
      const Eigen::MatrixXd back = delta * layer.weights;
      delta = back.array() *
              (1.0 - activations[l - 1].array().square());
    }
  }
  return {loss, std::move(gradient)};
}

std::shared_ptr<SoftmaxNetwork> make_logistic_regression(
    std::shared_ptr<const Dataset> data) {
  if (!data) throw ConfigError("logistic regression: null dataset");
  std::vector<std::size_t> sizes{data->feature_dim(),
                                 static_cast<std::size_t>(data->num_classes)};
  return std::make_shared<SoftmaxNetwork>(std::move(data), std::move(sizes));
}

std::shared_ptr<SoftmaxNetwork> make_mlp(std::shared_ptr<const Dataset> data,
                                         const std::vector<std::size_t>& hidden) {
  if (!data) throw ConfigError("mlp: null dataset");
  std::vector<std::size_t> sizes{data->feature_dim()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(static_cast<std::size_t>(data->num_classes));
  return std::make_shared<SoftmaxNetwork>(std::move(data), std::move(sizes));
}

double accuracy(const Problem& problem, const ParamVector& weights,
                const Dataset& dataset) {
  const auto* network = dynamic_cast<const SoftmaxNetwork*>(&problem);
  if (network == nullptr) {
    throw UnsupportedOperation("accuracy: not defined for problem kind " +
                               std::string(to_string(problem.kind())));
  }
  dataset.validate();
  const Eigen::MatrixXd scores = network->class_scores(weights, dataset);
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(r, c) > scores(r, best)) best = c;
    }
    if (best == dataset.labels[static_cast<std::size_t>(r)]) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(dataset.num_samples());
}

}  // namespace nlcg
