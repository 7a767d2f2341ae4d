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

#include "nlcg/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlcg/errors.hpp"

namespace nlcg {

std::string_view to_string(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::sgd:
      return "sgd";
    case OptimizerKind::momentum:
      return "momentum";
    case OptimizerKind::rmsprop:
      return "rmsprop";
    case OptimizerKind::nlcg_pr:
      return "nlcg_pr";
    case OptimizerKind::nlcg_fr:
      return "nlcg_fr";
  }
  return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  for (const auto kind :
       {OptimizerKind::sgd, OptimizerKind::momentum, OptimizerKind::rmsprop,
        OptimizerKind::nlcg_pr, OptimizerKind::nlcg_fr}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

bool is_nlcg(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::nlcg_pr || kind == OptimizerKind::nlcg_fr;
}

// ---------------------------------------------------------------------------
// SGD family

void FirstOrderConfig::validate() const {
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (!(rms_decay >= 0.0 && rms_decay < 1.0)) {
    throw ConfigError("rms_decay must lie in [0, 1)");
  }
  if (!(rms_epsilon > 0.0)) throw ConfigError("rms_epsilon must be positive");
}

namespace {

void ensure_buffer(ParamVector& buffer, std::size_t n) {
  if (buffer.empty()) buffer = ParamVector::zeros(n);
  if (buffer.size() != n) {
    throw DimensionError("optimizer state length does not match weights");
  }
}

}  // namespace

ParamVector sgd_step(FirstOrderState&, const ParamVector& weights,
                     const ParamVector& gradient, double lr) {
  return axpy(-lr, gradient, weights);
}

ParamVector momentum_step(FirstOrderState& state, const ParamVector& weights,
                          const ParamVector& gradient, double lr) {
  require_same_size(weights, gradient, "momentum_step");
  ensure_buffer(state.velocity, weights.size());
  state.velocity = axpy(state.config.momentum, state.velocity, gradient);
  return axpy(-lr, state.velocity, weights);
}

ParamVector rmsprop_step(FirstOrderState& state, const ParamVector& weights,
                         const ParamVector& gradient, double lr) {
  require_same_size(weights, gradient, "rmsprop_step");
  const std::size_t n = weights.size();
  ensure_buffer(state.velocity, n);
  ensure_buffer(state.rms_accumulator, n);
  const double rho = state.config.rms_decay;
  const double mu = state.config.momentum;
  const double eps = state.config.rms_epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = gradient[i];
    double& acc = state.rms_accumulator[i];
    acc = rho * acc + (1.0 - rho) * g * g;
    state.velocity[i] = mu * state.velocity[i] + g / std::sqrt(acc + eps);
  }
  require_finite(state.velocity, "rmsprop_step");
  return axpy(-lr, state.velocity, weights);
}

FirstOrderOptimizer::FirstOrderOptimizer(OptimizerKind kind,
                                         FirstOrderConfig config)
    : kind_(kind) {
  if (is_nlcg(kind)) {
    throw ConfigError("FirstOrderOptimizer: not a first-order kind");
  }
  config.validate();
  state_.config = config;
}

bool FirstOrderOptimizer::prepare(const ParamVector&, const GradientFn&) {
  return false;
}

StepMetrics FirstOrderOptimizer::step(ParamVector& weights,
                                      const GradientFn& eval,
                                      double global_lr) {
  const BatchEval e = eval(weights);
  switch (kind_) {
    case OptimizerKind::sgd:
      weights = sgd_step(state_, weights, e.gradient, global_lr);
      break;
    case OptimizerKind::momentum:
      weights = momentum_step(state_, weights, e.gradient, global_lr);
      break;
    case OptimizerKind::rmsprop:
      weights = rmsprop_step(state_, weights, e.gradient, global_lr);
      break;
    default:
      throw ConfigError("FirstOrderOptimizer: not a first-order kind");
  }
  if (float32_weights_) round_to_float(weights);
  StepMetrics m;
  m.loss = e.loss;
  m.lr_global = global_lr;
  m.lr_scale = 1.0;
  m.lr_effective = global_lr;
  m.grad_norm = norm(e.gradient);
  return m;
}

// ---------------------------------------------------------------------------
// NLCG

NlcgState nlcg_init(const ParamVector& weights, const BatchEval& first,
                    NlcgConfig config) {
  require_same_size(weights, first.gradient, "nlcg_init");
  config.line_search.validate();
  config.preconditioner.validate();

  NlcgState state;
  state.precond = PreconditionerState(config.preconditioner);
  state.residual = scaled(-1.0, first.gradient);
  const ParamVector m_inv =
      update_and_invert(state.precond, weights, first.gradient);
  state.precond_residual = hadamard(m_inv, state.residual);
  state.direction = state.precond_residual;
  state.delta_new = dot(state.residual, state.direction);
  state.line_search = observe(state.line_search, config.line_search, first.loss);
  state.config = std::move(config);
  return state;
}

NlcgStepResult nlcg_step(NlcgState& state, const ParamVector& weights,
                         const GradientFn& eval, double global_lr) {
  require_same_size(weights, state.direction, "nlcg_step");
  const NlcgConfig& cfg = state.config;

  StepMetrics m;
  m.lr_global = global_lr;
  m.lr_scale = state.line_search.scale;
  m.lr_effective =
      cfg.step_length_override
          ? cfg.step_length_override(state.residual, state.direction)
          : effective_lr(state.line_search, global_lr);

  NlcgStepResult out;
  out.weights = axpy(m.lr_effective, state.direction, weights);
  if (cfg.float32_weights) round_to_float(out.weights);

  const BatchEval e = eval(out.weights);
  state.residual = scaled(-1.0, e.gradient);
  state.line_search = observe(state.line_search, cfg.line_search, e.loss);

  state.delta_old = state.delta_new;
  state.delta_mid = dot(state.residual, state.precond_residual);
  const ParamVector m_inv =
      update_and_invert(state.precond, out.weights, e.gradient);
  state.precond_residual = hadamard(m_inv, state.residual);
  state.delta_new = dot(state.residual, state.precond_residual);

  double beta_raw = 0.0;
  if (std::abs(state.delta_old) >= cfg.restart_tolerance) {
    beta_raw = cfg.formula == BetaFormula::polak_ribiere
                   ? (state.delta_new - state.delta_mid) / state.delta_old
                   : state.delta_new / state.delta_old;
  }
  if (!std::isfinite(beta_raw)) {
    throw NumericError("nlcg_step: non-finite beta at step " +
                       std::to_string(state.t + 1));
  }
  state.beta = cfg.force_zero_beta ? 0.0 : std::clamp(beta_raw, 0.0, 1.0);
  state.direction = axpy(state.beta, state.direction, state.precond_residual);
  ++state.t;

  m.loss = e.loss;
  m.beta_raw = beta_raw;
  m.beta_clamped = state.beta;
  m.grad_norm = norm(e.gradient);
  out.metrics = m;
  return out;
}

double nlcg_exact_quadratic_step_length(const QuadraticProblem& problem,
                                        const ParamVector& residual,
                                        const ParamVector& direction) {
  const double curvature = dot(direction, problem.hessian_vector(direction));
  if (!(curvature > 0.0)) {
    throw NumericError("exact step length: d^T A d is not positive");
  }
  return dot(residual, direction) / curvature;
}

NlcgOptimizer::NlcgOptimizer(NlcgConfig config) : config_(std::move(config)) {
  config_.line_search.validate();
  config_.preconditioner.validate();
}

OptimizerKind NlcgOptimizer::kind() const noexcept {
  return config_.formula == BetaFormula::polak_ribiere ? OptimizerKind::nlcg_pr
                                                       : OptimizerKind::nlcg_fr;
}

bool NlcgOptimizer::prepare(const ParamVector& weights, const GradientFn& eval) {
  state_ = nlcg_init(weights, eval(weights), config_);
  return true;
}

StepMetrics NlcgOptimizer::step(ParamVector& weights, const GradientFn& eval,
                                double global_lr) {
  if (!state_) throw ConfigError("NlcgOptimizer: step() before prepare()");
  state_->config.float32_weights = float32_weights_;
  auto result = nlcg_step(*state_, weights, eval, global_lr);
  weights = std::move(result.weights);
  return result.metrics;
}

const NlcgState& NlcgOptimizer::state() const {
  if (!state_) throw ConfigError("NlcgOptimizer: not prepared");
  return *state_;
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& config) {
  if (!is_nlcg(config.kind)) {
    return std::make_unique<FirstOrderOptimizer>(config.kind,
                                                 config.first_order);
  }
  NlcgConfig nlcg = config.nlcg;
  nlcg.formula = config.kind == OptimizerKind::nlcg_pr
                     ? BetaFormula::polak_ribiere
                     : BetaFormula::fletcher_reeves;
  return std::make_unique<NlcgOptimizer>(std::move(nlcg));
}

}  // namespace nlcg
