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

#include "nlcg/preconditioner.hpp"

#include <cmath>
#include <string>

#include "nlcg/errors.hpp"

namespace nlcg {

void PreconditionerConfig::validate() const {
  if (!(curvature_floor > 0.0) || !std::isfinite(curvature_floor)) {
    throw ConfigError("preconditioner: curvature_floor must be positive");
  }
  if (!(skip_tolerance >= 0.0)) {
    throw ConfigError("preconditioner: skip_tolerance must be >= 0");
  }
}

ParamVector identity_inverse(std::size_t n) {
  if (n < 1) throw ConfigError("identity_inverse: n must be >= 1");
  return ParamVector::ones(n);
}

ParamVector update_and_invert(PreconditionerState& state,
                              const ParamVector& weights,
                              const ParamVector& gradient) {
  require_same_size(weights, gradient, "preconditioner");
  const std::size_t n = weights.size();

  if (state.config.identity_mode) {
    ++state.step;
    return identity_inverse(n);
  }

  if (state.step == 0) {
    state.h_diag = ParamVector::ones(n);
  } else {
    require_same_size(state.h_diag, weights, "preconditioner");
    const ParamVector s = difference(weights, state.w_old);
    const ParamVector y = difference(gradient, state.grad_old);
    const double ys = dot(y, s);
    const double shs = dot(hadamard(state.h_diag, s), s);
    const double tol = state.config.skip_tolerance;
    if (ys < tol || shs < tol) {
      // Near-zero or negative curvature along s: keep the old diagonal.
      ++state.skipped;
    } else {
      ParamVector next(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double h = state.h_diag[i];
        const double hs = h * s[i];
        next[i] = h + y[i] * y[i] / ys - hs * hs / shs;
      }
      if (!all_finite(next)) {
        throw NumericError("preconditioner: non-finite diagonal at step " +
                           std::to_string(state.step));
      }
      state.h_diag = std::move(next);
    }
  }
  state.w_old = weights;
  state.grad_old = gradient;
  ++state.step;
  return reciprocal_clamped(state.h_diag, state.config.curvature_floor);
}

}  // namespace nlcg
