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

#ifndef NLCG_LINESEARCH_HPP_
#define NLCG_LINESEARCH_HPP_

#include <optional>

namespace nlcg {

/// Thresholds of the online stochastic line search. All values are
/// fractions of the previous mini-batch loss.
struct LineSearchConfig {
  /// A rise above this shrinks the scale.
  double increase_threshold = 0.02;
  /// A rise below this (including any fall) grows the scale.
  double flat_threshold = 0.01;
  double decrease_factor = 0.025;
  double increase_factor = 0.025;
  bool enabled = true;

  void validate() const;
};

/// Learning-rate scale in (0, 1], starting at 1.
struct LineSearchState {
  double scale = 1.0;
  std::optional<double> previous_loss;
};

/**
 * Feeds one mini-batch loss to the monitor.
 *
 * The relative change against the previous step's loss decides the update:
 * above increase_threshold the scale is multiplied by (1 - decrease_factor);
 * below flat_threshold it is multiplied by (1 + increase_factor) and capped
 * at 1; in between it is left alone. The relative change is taken against
 * |previous_loss| so objectives with negative values behave the same way.
 */
LineSearchState observe(const LineSearchState& state,
                        const LineSearchConfig& config, double loss);

/// global_lr * scale.
double effective_lr(const LineSearchState& state, double global_lr);

}  // namespace nlcg

#endif  // NLCG_LINESEARCH_HPP_
