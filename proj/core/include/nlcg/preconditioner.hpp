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

#ifndef NLCG_PRECONDITIONER_HPP_
#define NLCG_PRECONDITIONER_HPP_

#include <cstddef>
#include <cstdint>

#include "nlcg/numerics.hpp"

namespace nlcg {

struct PreconditionerConfig {
  /// Diagonal entries below this are raised to it before inversion.
  double curvature_floor = 1e-8;
  /// Updates with |y^T s| or |s^T H s| below this are skipped.
  double skip_tolerance = 1e-12;
  /// Always return the identity (unpreconditioned NLCG).
  bool identity_mode = false;

  void validate() const;
};

/**
 * Diagonal BFGS estimate of the Hessian.
 *
 * Keeps the diagonal H together with the weights and gradient seen at the
 * previous call; each call applies the BFGS correction restricted to the
 * diagonal,
 *
 *   H_i += y_i^2 / (y^T s) - H_i^2 s_i^2 / (s^T H s),
 *
 * with s = w - w_old and y = g - g_old, and returns 1 / max(H_i, floor).
 */
struct PreconditionerState {
  ParamVector h_diag;
  ParamVector w_old;
  ParamVector grad_old;
  std::int64_t step = 0;
  /// Number of calls that left h_diag unchanged because of the guards.
  std::int64_t skipped = 0;
  PreconditionerConfig config;

  explicit PreconditionerState(PreconditionerConfig cfg = {})
      : config(cfg) {}
};

/// Records (weights, gradient), updates the diagonal when step > 0 and
/// returns the diagonal of M^{-1}. In identity mode returns all ones and
/// leaves the state untouched apart from the step counter.
ParamVector update_and_invert(PreconditionerState& state,
                              const ParamVector& weights,
                              const ParamVector& gradient);

ParamVector identity_inverse(std::size_t n);

}  // namespace nlcg

#endif  // NLCG_PRECONDITIONER_HPP_
