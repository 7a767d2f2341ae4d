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

#include <algorithm>
#include <numeric>
#include <random>

#include "nlcg/errors.hpp"
#include "nlcg/preconditioner.hpp"
#include "test_support.hpp"

namespace nlcg {
namespace {

TEST(Preconditioner, FirstCallReturnsIdentity) {
  PreconditionerState state;
  const auto inv = update_and_invert(state, {3, -1, 2}, {5, 5, 5});
  EXPECT_EQ(inv, ParamVector::ones(3));
  EXPECT_EQ(state.step, 1);
  EXPECT_EQ(state.w_old, (ParamVector{3, -1, 2}));
  EXPECT_EQ(state.grad_old, (ParamVector{5, 5, 5}));
}

TEST(Preconditioner, ScalarQuadraticWorkedExample) {
  // f = 2 w^2: w 1 -> 0.5, g 4 -> 2.
  PreconditionerState state;
  update_and_invert(state, {1.0}, {4.0});
  const auto inv = update_and_invert(state, {0.5}, {2.0});
  EXPECT_EQ(state.h_diag[0], 4.0);
  EXPECT_EQ(inv[0], 0.25);
}

TEST(Preconditioner, ScalarCurvatureRecoveredFromAnyStart) {
  for (double a : {0.1, 1.0, 4.0, 100.0}) {
    for (double h0 : {0.01, 1.0, 50.0}) {
      for (double step : {-0.3, 1e-3, 2.0}) {
        PreconditionerState state;
        const double w0 = 0.7;
        update_and_invert(state, {w0}, {a * w0 - 1.0});
        state.h_diag[0] = h0;
        const double w1 = w0 + step;
        update_and_invert(state, {w1}, {a * w1 - 1.0});
        // h0 + a - h0 cancels, so rounding scales with the larger term.
        EXPECT_NEAR(state.h_diag[0], a, 1e-12 * std::max(a, h0))
            << "a=" << a << " h0=" << h0 << " step=" << step;
      }
    }
  }
}

TEST(Preconditioner, AxisStepsRecoverDiagonalCurvature) {
  const ParamVector a{0.5, 3.0, 20.0, 1e-3};
  auto grad = [&](const ParamVector& w) { return hadamard(a, w); };
  PreconditionerState state;
  ParamVector w{1.0, 1.0, 1.0, 1.0};
  update_and_invert(state, w, grad(w));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double before_other = state.h_diag[(i + 1) % a.size()];
    w[i] -= 0.25;
    update_and_invert(state, w, grad(w));
    EXPECT_NEAR(state.h_diag[i], a[i], 1e-12 * a[i]) << i;
    EXPECT_EQ(state.h_diag[(i + 1) % a.size()], before_other);
  }
}

TEST(Preconditioner, IdenticalGradientsSkipUpdate) {
  PreconditionerState state;
  update_and_invert(state, {1, 2}, {3, 4});
  const auto before = state.h_diag;
  const auto inv = update_and_invert(state, {2, 3}, {3, 4});
  EXPECT_EQ(state.h_diag, before);
  EXPECT_EQ(inv, ParamVector::ones(2));
  EXPECT_EQ(state.skipped, 1);
  EXPECT_EQ(state.step, 2);
}

TEST(Preconditioner, NegativeCurvatureSkipsUpdate) {
  PreconditionerState state;
  update_and_invert(state, {0.0}, {1.0});
  update_and_invert(state, {1.0}, {0.0});  // y^T s = -1
  EXPECT_EQ(state.h_diag[0], 1.0);
  EXPECT_EQ(state.skipped, 1);
}

TEST(Preconditioner, OutputAlwaysPositiveAndBounded) {
  PreconditionerConfig config;
  config.curvature_floor = 1e-6;
  PreconditionerState state(config);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  ParamVector w(20);
  ParamVector g(20);
  for (int t = 0; t < 200; ++t) {
    for (std::size_t i = 0; i < 20; ++i) {
      w[i] += normal(rng);
      g[i] = normal(rng) * 5.0;
    }
    const auto inv = update_and_invert(state, w, g);
    for (double v : inv) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0 / config.curvature_floor);
    }
  }
}

TEST(Preconditioner, PermutationInvariant) {
  const std::size_t n = 6;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto permute = [&](const ParamVector& v) {
    ParamVector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = v[perm[i]];
    return out;
  };
  PreconditionerState plain;
  PreconditionerState shuffled;
  for (std::uint64_t t = 0; t < 5; ++t) {
    const auto w = testing::random_vector(n, t);
    ParamVector g = w;
    for (std::size_t i = 0; i < n; ++i) g[i] = (1.0 + i) * w[i];
    const auto a = update_and_invert(plain, w, g);
    const auto b = update_and_invert(shuffled, permute(w), permute(g));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(b[i], a[perm[i]], 1e-12 * a[perm[i]]);
  }
}

TEST(Preconditioner, IdentityModeMatchesIdentityInverse) {
  PreconditionerConfig config;
  config.identity_mode = true;
  PreconditionerState state(config);
  for (std::uint64_t t = 0; t < 3; ++t) {
    EXPECT_EQ(update_and_invert(state, testing::random_vector(3, t),
                                testing::random_vector(3, t + 9)),
              identity_inverse(3));
  }
  EXPECT_EQ(identity_inverse(3), (ParamVector{1, 1, 1}));
  EXPECT_THROW(identity_inverse(0), ConfigError);
}

TEST(Preconditioner, Errors) {
  PreconditionerState state;
  EXPECT_THROW(update_and_invert(state, {1, 2}, {1}), DimensionError);
  update_and_invert(state, {1, 2}, {1, 1});
  EXPECT_THROW(update_and_invert(state, {1, 2, 3}, {1, 1, 1}), DimensionError);
  PreconditionerConfig bad;
  bad.curvature_floor = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Preconditioner, OverflowReportsStep) {
  PreconditionerState state;
  update_and_invert(state, {0.0, 0.0}, {0.0, 0.0});
  try {
    update_and_invert(state, {1e-300, 1.0}, {1e300, 1.0});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace nlcg
