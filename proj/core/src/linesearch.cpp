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

#include "nlcg/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlcg/errors.hpp"

namespace nlcg {

void LineSearchConfig::validate() const {
  if (!(flat_threshold >= 0.0 && flat_threshold <= increase_threshold)) {
    throw ConfigError("line search: need 0 <= flat_threshold <= increase_threshold");
  }
  if (!(decrease_factor > 0.0 && decrease_factor < 1.0)) {
    throw ConfigError("line search: decrease_factor must lie in (0, 1)");
  }
  if (!(increase_factor > 0.0 && increase_factor < 1.0)) {
    throw ConfigError("line search: increase_factor must lie in (0, 1)");
  }
}

LineSearchState observe(const LineSearchState& state,
                        const LineSearchConfig& config, double loss) {
  if (!config.enabled) return state;
  if (!std::isfinite(loss)) throw NumericError("line search: non-finite loss");

  LineSearchState next = state;
  next.previous_loss = loss;
  if (!state.previous_loss) return next;

  const double previous = *state.previous_loss;
  double rise = 0.0;
  if (previous != 0.0) {
    rise = (loss - previous) / std::abs(previous);
  } else if (loss > 0.0) {
    rise = std::numeric_limits<double>::infinity();
  } else if (loss < 0.0) {
    rise = -1.0;
  }

  if (rise > config.increase_threshold) {
    next.scale = state.scale * (1.0 - config.decrease_factor);
  } else if (rise < config.flat_threshold) {
    next.scale = std::min(1.0, state.scale * (1.0 + config.increase_factor));
  }
  return next;
}

double effective_lr(const LineSearchState& state, double global_lr) {
  return global_lr * state.scale;
}

}  // namespace nlcg
