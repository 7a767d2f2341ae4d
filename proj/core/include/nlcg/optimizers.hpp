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

#ifndef NLCG_OPTIMIZERS_HPP_
#define NLCG_OPTIMIZERS_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>

#include "nlcg/linesearch.hpp"
#include "nlcg/numerics.hpp"
#include "nlcg/preconditioner.hpp"
#include "nlcg/problems.hpp"

namespace nlcg {

enum class OptimizerKind { sgd, momentum, rmsprop, nlcg_pr, nlcg_fr };

std::string_view to_string(OptimizerKind kind) noexcept;
/// Throws ConfigError for unknown names.
OptimizerKind parse_optimizer_kind(std::string_view name);
bool is_nlcg(OptimizerKind kind) noexcept;

/// Evaluates the current step's mini-batch at the given weights.
using GradientFn = std::function<BatchEval(const ParamVector& weights)>;

/// What one training step reports to the run log.
struct StepMetrics {
  double loss = 0.0;
  double lr_global = 0.0;
  double lr_scale = 1.0;
  double lr_effective = 0.0;
  /// NLCG only: beta before and after clamping to [0, 1].
  std::optional<double> beta_raw;
  std::optional<double> beta_clamped;
  double grad_norm = 0.0;
};

// ---------------------------------------------------------------------------
// SGD family

struct FirstOrderConfig {
  double momentum = 0.9;
  double rms_decay = 0.9;
  double rms_epsilon = 1e-10;

  void validate() const;
};

struct FirstOrderState {
  ParamVector velocity;
  ParamVector rms_accumulator;
  FirstOrderConfig config;
};

/// w - lr * g.
ParamVector sgd_step(FirstOrderState& state, const ParamVector& weights,
                     const ParamVector& gradient, double lr);

/// v = mu * v + g; w - lr * v.
ParamVector momentum_step(FirstOrderState& state, const ParamVector& weights,
                          const ParamVector& gradient, double lr);

/// acc = rho * acc + (1 - rho) * g^2; v = mu * v + g / sqrt(acc + eps);
/// w - lr * v.
ParamVector rmsprop_step(FirstOrderState& state, const ParamVector& weights,
                         const ParamVector& gradient, double lr);

// ---------------------------------------------------------------------------
// Preconditioned nonlinear conjugate gradients

enum class BetaFormula { polak_ribiere, fletcher_reeves };

/// Replaces global_lr * scale with a caller-chosen step length, given the
/// current residual r = -grad and direction d. Test hook only.
using StepLengthFn =
    std::function<double(const ParamVector& residual, const ParamVector& direction)>;

struct NlcgConfig {
  BetaFormula formula = BetaFormula::fletcher_reeves;
  LineSearchConfig line_search;
  PreconditionerConfig preconditioner;
  /// |delta_old| below this restarts with beta = 0 instead of dividing.
  double restart_tolerance = 1e-12;
  /// Ablation: always use beta = 0 (preconditioned steepest descent).
  bool force_zero_beta = false;
  /// Round the weights through 32-bit storage after each move.
  bool float32_weights = false;
  StepLengthFn step_length_override;
};

struct NlcgState {
  ParamVector residual;   // r = -grad at the current weights
  ParamVector precond_residual;  // s = M^{-1} r
  ParamVector direction;  // d
  double delta_new = 0.0;
  double delta_old = 0.0;
  double delta_mid = 0.0;
  double beta = 0.0;
  std::int64_t t = 0;
  PreconditionerState precond;
  LineSearchState line_search;
  NlcgConfig config;
};

/// Sets up r, s = M^{-1} r, d = s and delta_new = r^T d from the first
/// mini-batch evaluation. The preconditioner must not have been used yet.
NlcgState nlcg_init(const ParamVector& weights, const BatchEval& first,
                    NlcgConfig config);

struct NlcgStepResult {
  ParamVector weights;
  StepMetrics metrics;
};

/// One iteration: move along d with alpha = global_lr * scale, evaluate the
/// mini-batch at the new point, feed its loss to the line search, refresh
/// the preconditioner and form the next conjugate direction.
NlcgStepResult nlcg_step(NlcgState& state, const ParamVector& weights,
                         const GradientFn& eval, double global_lr);

/// r^T d / d^T A d, the exact minimizing step on a quadratic.
double nlcg_exact_quadratic_step_length(const QuadraticProblem& problem,
                                        const ParamVector& residual,
                                        const ParamVector& direction);

// ---------------------------------------------------------------------------
// Uniform driver interface used by the harness

class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual OptimizerKind kind() const noexcept = 0;

  /// Called once before the first step with an evaluator for the first
  /// mini-batch. Returns true if that mini-batch was consumed.
  virtual bool prepare(const ParamVector& weights, const GradientFn& eval) = 0;

  /// Advances `weights` by one step. `eval` is bound to this step's
  /// mini-batch.
  virtual StepMetrics step(ParamVector& weights, const GradientFn& eval,
                           double global_lr) = 0;

  /// Rounds weights through 32-bit storage after every update.
  void set_float32_weights(bool on) noexcept { float32_weights_ = on; }

 protected:
  bool float32_weights_ = false;
};

class FirstOrderOptimizer final : public Optimizer {
 public:
  FirstOrderOptimizer(OptimizerKind kind, FirstOrderConfig config);

  OptimizerKind kind() const noexcept override { return kind_; }
  bool prepare(const ParamVector& weights, const GradientFn& eval) override;
  StepMetrics step(ParamVector& weights, const GradientFn& eval,
                   double global_lr) override;

  const FirstOrderState& state() const noexcept { return state_; }

 private:
  OptimizerKind kind_;
  FirstOrderState state_;
};

class NlcgOptimizer final : public Optimizer {
 public:
  explicit NlcgOptimizer(NlcgConfig config);

  OptimizerKind kind() const noexcept override;
  bool prepare(const ParamVector& weights, const GradientFn& eval) override;
  StepMetrics step(ParamVector& weights, const GradientFn& eval,
                   double global_lr) override;

  /// Valid after prepare().
  const NlcgState& state() const;

 private:
  NlcgConfig config_;
  std::optional<NlcgState> state_;
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::sgd;
  FirstOrderConfig first_order;
  NlcgConfig nlcg;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& config);

}  // namespace nlcg

#endif  // NLCG_OPTIMIZERS_HPP_
