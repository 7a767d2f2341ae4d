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

#include <cmath>

#include "nlcg/errors.hpp"
#include "nlcg/optimizers.hpp"
#include "test_support.hpp"

namespace nlcg {
namespace {

TEST(SgdStep, Definition) {
  FirstOrderState state;
  const auto w = sgd_step(state, {0, 0}, {1, -2}, 0.1);
  EXPECT_DOUBLE_EQ(w[0], -0.1);
  EXPECT_DOUBLE_EQ(w[1], 0.2);
}

TEST(MomentumStep, SecondDisplacementIsOnePointNine) {
  FirstOrderState state;
  const ParamVector g{0.5, -1.0};
  const double lr = 0.01;
  const auto w1 = momentum_step(state, {0, 0}, g, lr);
  const auto w2 = momentum_step(state, w1, g, lr);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(w2[i] - w1[i], -1.9 * lr * g[i], 1e-17);
  }
}

TEST(RmspropStep, StepMagnitudeIndependentOfGradientScale) {
  // With a constant gradient the accumulator tends to g^2, so the velocity
  // tends to sum mu^k = 1 / (1 - mu) and each step to lr / (1 - mu).
  const double lr = 0.001;
  for (double scale : {1e-2, 1.0, 1e3}) {
    FirstOrderState state;
    ParamVector w{0.0};
    ParamVector prev = w;
    for (int t = 0; t < 400; ++t) {
      prev = w;
      w = rmsprop_step(state, w, {scale}, lr);
    }
    const double expected = lr / (1.0 - 0.9);
    EXPECT_NEAR(prev[0] - w[0], expected, 1e-6 * expected) << scale;
  }
}

TEST(FirstOrder, ZeroGradientLeavesWeights) {
  const ParamVector w{1.5, -2.0, 3.0};
  const auto zero = ParamVector::zeros(3);
  FirstOrderState s1;
  FirstOrderState s2;
  FirstOrderState s3;
  ParamVector a = w;
  ParamVector b = w;
  ParamVector c = w;
  for (int t = 0; t < 5; ++t) {
    a = sgd_step(s1, a, zero, 0.1);
    b = momentum_step(s2, b, zero, 0.1);
    c = rmsprop_step(s3, c, zero, 0.1);
  }
  EXPECT_EQ(a, w);
  EXPECT_EQ(b, w);
  EXPECT_EQ(c, w);
}

TEST(FirstOrder, Errors) {
  FirstOrderState state;
  EXPECT_THROW(sgd_step(state, {1, 2}, {1}, 0.1), DimensionError);
  EXPECT_THROW(momentum_step(state, {1, 2}, {1}, 0.1), DimensionError);
  EXPECT_THROW(rmsprop_step(state, {1, 2}, {1}, 0.1), DimensionError);
  EXPECT_THROW(sgd_step(state, {1}, {1e308}, -1e10), NumericError);
  FirstOrderConfig bad;
  bad.momentum = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(FirstOrderOptimizer, StepsThroughInterface) {
  OptimizerConfig config;
  config.kind = OptimizerKind::momentum;
  auto opt = make_optimizer(config);
  EXPECT_EQ(opt->kind(), OptimizerKind::momentum);
  ParamVector w{1.0};
  const GradientFn eval = [](const ParamVector& x) {
    return BatchEval{0.5 * x[0] * x[0], ParamVector{x[0]}};
  };
  EXPECT_FALSE(opt->prepare(w, eval));
  const auto m = opt->step(w, eval, 0.1);
  EXPECT_EQ(m.loss, 0.5);
  EXPECT_EQ(m.grad_norm, 1.0);
  EXPECT_FALSE(m.beta_raw);
  EXPECT_DOUBLE_EQ(w[0], 0.9);
}

TEST(OptimizerKind, NamesRoundTrip) {
  for (auto k : {OptimizerKind::sgd, OptimizerKind::momentum,
                 OptimizerKind::rmsprop, OptimizerKind::nlcg_pr,
                 OptimizerKind::nlcg_fr}) {
    EXPECT_EQ(parse_optimizer_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_optimizer_kind("adam"), ConfigError);
  EXPECT_TRUE(is_nlcg(OptimizerKind::nlcg_pr));
  EXPECT_FALSE(is_nlcg(OptimizerKind::rmsprop));
}

}  // namespace
}  // namespace nlcg
