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


#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <numeric>

#include "nlcg/errors.hpp"
#include "nlcg/optimizers.hpp"
#include "nlcg/problems.hpp"
#include "test_support.hpp"

namespace nlcg {
namespace {

using testing::finite_difference_gradient;
using testing::max_relative_error;

// Central differences at step 1e-4 carry an O(h^2) absolute error of a few
// 1e-9, so coordinates with |g| below 1e-3 are compared against that floor.
constexpr double kFdTolerance = 1e-5;
constexpr double kFdFloor = 1e-3;

std::shared_ptr<const Dataset> small_data(std::uint64_t seed,
                                          std::size_t n = 64,
                                          std::size_t dim = 5,
                                          int classes = 3) {
  return std::make_shared<const Dataset>(
      make_synthetic_classification(n, dim, classes, 1.0, seed));
}

ParamVector perturbed_weights(const Problem& p, std::uint64_t seed) {
  auto w = p.initial_weights(seed);
  const auto jitter = testing::random_vector(w.size(), seed + 1000, 0.3);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += jitter[i];
  return w;
}

TEST(MakeQuadratic, ScalarCase) {
  const auto q = make_quadratic(1, 1.0, 3);
  ASSERT_EQ(q->weight_count(), 1u);
  const double a = q->matrix()(0, 0);
  const double b = q->linear_term()(0);
  EXPECT_GT(a, 0.0);
  const ParamVector w{0.7};
  EXPECT_NEAR(q->value(w), 0.5 * a * 0.49 - b * 0.7, 1e-15);
}

TEST(MakeQuadratic, UnitConditionIsScaledIdentity) {
  const auto q = make_quadratic(6, 1.0, 11);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q->matrix());
  const auto& ev = eig.eigenvalues();
  EXPECT_NEAR(ev.maxCoeff() - ev.minCoeff(), 0.0, 1e-12);
  const Eigen::MatrixXd diff =
      q->matrix() - ev(0) * Eigen::MatrixXd::Identity(6, 6);
  EXPECT_LE(diff.norm(), 1e-12);
}

TEST(MakeQuadratic, GradientVanishesAtOptimum) {
  const auto q = make_quadratic(3, 100.0, 7);
  const auto e = q->evaluate_all(q->optimum());
  EXPECT_LE(norm(e.gradient), 1e-10);
}

TEST(MakeQuadratic, ConditionNumberHonoured) {
  for (Spectrum s : {Spectrum::linear, Spectrum::geometric}) {
    const auto q = make_quadratic(12, 1e3, 5, {.spectrum = s});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q->matrix());
    const auto& ev = eig.eigenvalues();
    EXPECT_NEAR(ev.maxCoeff() / ev.minCoeff(), 1e3, 1e-6);
  }
}

TEST(MakeQuadratic, DeterministicInSeed) {
  const auto a = make_quadratic(5, 10.0, 42);
  const auto b = make_quadratic(5, 10.0, 42);
  const auto c = make_quadratic(5, 10.0, 43);
  EXPECT_EQ(a->matrix(), b->matrix());
  EXPECT_EQ(a->linear_term(), b->linear_term());
  EXPECT_NE(a->matrix(), c->matrix());
}

TEST(MakeQuadratic, RejectsBadArguments) {
  EXPECT_THROW(make_quadratic(0, 10.0, 1), ConfigError);
  EXPECT_THROW(make_quadratic(3, 0.5, 1), ConfigError);
}

TEST(QuadraticProblem, RejectsNonSpdMatrix) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, -1;
  EXPECT_THROW(QuadraticProblem(a, Eigen::VectorXd(Eigen::VectorXd::Zero(2))), ConfigError);
  Eigen::MatrixXd asym(2, 2);
  asym << 2, 1, 0, 2;
  EXPECT_THROW(QuadraticProblem(asym, Eigen::VectorXd(Eigen::VectorXd::Zero(2))), ConfigError);
}

TEST(QuadraticProblem, GradientIsAwMinusB) {
  const auto q = make_quadratic(8, 50.0, 2);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto w = testing::random_vector(8, s);
    const Eigen::VectorXd expect =
        q->matrix() * testing::to_eigen(w) - q->linear_term();
    const auto g = q->evaluate_all(w).gradient;
    EXPECT_LE((testing::to_eigen(g) - expect).norm(), 1e-12 * expect.norm());
  }
}

TEST(QuadraticProblem, HessianVectorProduct) {
  const auto q = make_quadratic(5, 20.0, 8);
  const auto v = testing::random_vector(5, 1);
  const Eigen::VectorXd expect = q->matrix() * testing::to_eigen(v);
  EXPECT_LE((testing::to_eigen(q->hessian_vector(v)) - expect).norm(),
            1e-14 * expect.norm());
}

TEST(QuadraticProblem, NoisySamplesAverageToFullLinearTerm) {
  const auto q = make_quadratic(4, 10.0, 3, {.samples = 16, .noise = 0.5});
  EXPECT_EQ(q->sample_count(), 16u);
  const auto w = testing::random_vector(4, 2);
  const auto one = q->evaluate(w, std::vector<std::size_t>{0}).gradient;
  const auto all = q->evaluate_all(w).gradient;
  EXPECT_GT(testing::relative_difference(one, all), 1e-3);
  const Eigen::VectorXd expect =
      q->matrix() * testing::to_eigen(w) - q->linear_term();
  EXPECT_LE((testing::to_eigen(all) - expect).norm(), 1e-12 * expect.norm());
}

TEST(DiagonalQuadratic, MatrixIsDiagonalWithRequestedSpread) {
  const auto q = make_diagonal_quadratic(50, 1e4, 1);
  const auto& a = q->matrix();
  EXPECT_EQ((a - Eigen::MatrixXd(a.diagonal().asDiagonal())).norm(), 0.0);
  EXPECT_NEAR(a.diagonal().maxCoeff() / a.diagonal().minCoeff(), 1e4, 1e-6);
}

TEST(Evaluate, ValidatesArguments) {
  const auto q = make_quadratic(3, 10.0, 1);
  const std::vector<std::size_t> batch{0};
  EXPECT_THROW(q->evaluate(ParamVector(2), batch), DimensionError);
  EXPECT_THROW(q->evaluate(ParamVector(3), std::vector<std::size_t>{1}),
               IndexError);
  EXPECT_THROW(q->evaluate(ParamVector(3), std::vector<std::size_t>{}),
               ConfigError);
  ParamVector bad(3);
  bad[1] = std::nan("");
  EXPECT_THROW(q->evaluate(bad, batch), NumericError);
}

TEST(Evaluate, MlpGradientMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto data = small_data(s);
    const auto p = make_mlp(data, {7, 4});
    const auto w = perturbed_weights(*p, s);
    const auto batch = testing::random_batch(data->num_samples(), 16, s + 7);
    const auto g = p->evaluate(w, batch).gradient;
    const auto fd = finite_difference_gradient(*p, w, batch);
    EXPECT_LE(max_relative_error(g, fd, kFdFloor), kFdTolerance) << "draw " << s;
  }
}

TEST(Evaluate, LogisticGradientMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto data = small_data(s + 50);
    const auto p = make_logistic_regression(data);
    EXPECT_EQ(p->kind(), ProblemKind::logistic_regression);
    const auto w = perturbed_weights(*p, s);
    const auto batch = testing::random_batch(data->num_samples(), 16, s + 9);
    const auto g = p->evaluate(w, batch).gradient;
    const auto fd = finite_difference_gradient(*p, w, batch);
    EXPECT_LE(max_relative_error(g, fd, kFdFloor), kFdTolerance) << "draw " << s;
  }
}

TEST(Evaluate, QuadraticGradientMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto q = make_quadratic(6, 100.0, s, {.samples = 8, .noise = 0.3});
    const auto w = testing::random_vector(6, s + 3);
    const auto batch = testing::random_batch(8, 3, s);
    const auto g = q->evaluate(w, batch).gradient;
    const auto fd = finite_difference_gradient(*q, w, batch);
    EXPECT_LE(max_relative_error(g, fd, kFdFloor), kFdTolerance) << "draw " << s;
  }
}

// The mean over a union of disjoint batches is the size-weighted mean of
// the parts.
void expect_union_linearity(const Problem& p, const ParamVector& w,
                            std::uint64_t seed) {
  const auto idx = testing::random_batch(p.sample_count(), 24, seed);
  const std::vector<std::size_t> first(idx.begin(), idx.begin() + 7);
  const std::vector<std::size_t> second(idx.begin() + 7, idx.end());
  const auto u = p.evaluate(w, idx);
  const auto a = p.evaluate(w, first);
  const auto b = p.evaluate(w, second);
  const double wa = 7.0 / 24.0;
  const double wb = 17.0 / 24.0;
  EXPECT_LE(testing::relative_difference(wa * a.loss + wb * b.loss, u.loss),
            1e-10);
  const auto mixed = axpy(wa, a.gradient, scaled(wb, b.gradient));
  EXPECT_LE(testing::relative_difference(mixed, u.gradient), 1e-10);
}

TEST(Evaluate, UnionOfBatchesIsWeightedMean) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto data = small_data(s);
    const auto mlp = make_mlp(data, {6});
    expect_union_linearity(*mlp, perturbed_weights(*mlp, s), s);
    const auto lr = make_logistic_regression(data);
    expect_union_linearity(*lr, perturbed_weights(*lr, s), s);
    const auto q = make_quadratic(5, 10.0, s, {.samples = 32, .noise = 1.0});
    expect_union_linearity(*q, testing::random_vector(5, s), s);
  }
}

TEST(SoftmaxNetwork, LayoutAndKind) {
  const auto data = small_data(1, 20, 4, 3);
  const auto p = make_mlp(data, {5});
  EXPECT_EQ(p->kind(), ProblemKind::mlp);
  EXPECT_EQ(p->weight_count(), 5u * 4u + 5u + 3u * 5u + 3u);
  EXPECT_THROW(SoftmaxNetwork(data, {3, 3}), ConfigError);
  EXPECT_THROW(SoftmaxNetwork(data, {4, 2}), ConfigError);
  EXPECT_THROW(SoftmaxNetwork(data, {4, 0, 3}), ConfigError);
}

TEST(SoftmaxNetwork, GlorotInitialisation) {
  const auto data = small_data(1, 20, 4, 3);
  const auto p = make_mlp(data, {5});
  const auto w = p->initial_weights(9);
  EXPECT_EQ(w, p->initial_weights(9));
  const double limit1 = std::sqrt(6.0 / 9.0);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_LE(std::abs(w[i]), limit1);
  for (std::size_t i = 20; i < 25; ++i) EXPECT_EQ(w[i], 0.0);
  const double limit2 = std::sqrt(6.0 / 8.0);
  for (std::size_t i = 25; i < 40; ++i) EXPECT_LE(std::abs(w[i]), limit2);
  for (std::size_t i = 40; i < 43; ++i) EXPECT_EQ(w[i], 0.0);
}

TEST(SoftmaxNetwork, UniformScoresGiveLogClassesLoss) {
  const auto data = small_data(2, 30, 4, 5);
  const auto p = make_logistic_regression(data);
  const auto e = p->evaluate_all(ParamVector::zeros(p->weight_count()));
  EXPECT_NEAR(e.loss, std::log(5.0), 1e-14);
}

Dataset four_samples() {
  Dataset d;
  d.num_classes = 2;
  d.features.resize(4, 1);
  d.features << -2.0, -1.0, 1.0, 2.0;
  d.labels = {0, 0, 1, 0};
  return d;
}

TEST(Accuracy, HandBuiltCase) {
  // Scores: class 0 = 0, class 1 = x. Predictions 0, 0, 1, 1.
  const auto data = std::make_shared<const Dataset>(four_samples());
  const auto p = make_logistic_regression(data);
  const ParamVector w{0.0, 1.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(accuracy(*p, w, *data), 0.75);
}

TEST(Accuracy, ConstantPredictorTiesGoToClassZero) {
  const auto data = std::make_shared<const Dataset>(
      make_synthetic_classification(10, 2, 2, 1.0, 3));
  const auto p = make_logistic_regression(data);
  EXPECT_DOUBLE_EQ(accuracy(*p, ParamVector::zeros(p->weight_count()), *data),
                   0.5);
  auto skewed = *data;
  skewed.labels = {0, 0, 0, 1, 1, 1, 1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(accuracy(*p, ParamVector::zeros(p->weight_count()), skewed),
                   0.3);
}

TEST(Accuracy, PerfectFit) {
  const auto data = std::make_shared<const Dataset>(four_samples());
  auto labels = *data;
  labels.labels = {0, 0, 1, 1};
  const auto p = make_logistic_regression(data);
  EXPECT_DOUBLE_EQ(accuracy(*p, {0.0, 1.0, 0.0, 0.0}, labels), 1.0);
}

TEST(Accuracy, UnsupportedOnQuadratic) {
  const auto q = make_quadratic(2, 2.0, 1);
  EXPECT_THROW(accuracy(*q, ParamVector(2), four_samples()),
               UnsupportedOperation);
}

TEST(SyntheticClassification, SeparableDataIsLearnt) {
  const auto data = std::make_shared<const Dataset>(
      make_synthetic_classification(100, 2, 2, 10.0, 5));
  const auto p = make_logistic_regression(data);
  ParamVector w = p->initial_weights(1);
  FirstOrderState state;
  for (int i = 0; i < 500; ++i) {
    w = sgd_step(state, w, p->evaluate_all(w).gradient, 0.5);
  }
  EXPECT_GE(accuracy(*p, w, *data), 0.99);
}

}  // namespace
}  // namespace nlcg
