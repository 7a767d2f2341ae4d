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

#ifndef NLCG_SCHEDULE_HPP_
#define NLCG_SCHEDULE_HPP_

#include <cstdint>

namespace nlcg {

/**
 * Global learning-rate schedule: linear warmup from initial_lr to
 * peak_lr() = base_lr * batch_size / reference_batch, then a step-wise
 * exponential decay applied once per decay interval and reaching final_lr
 * on the last training step.
 */
struct ScheduleConfig {
  double base_lr = 0.1;
  std::int64_t reference_batch = 256;
  std::int64_t batch_size = 256;
  double initial_lr = 0.001;
  double final_lr = 0.001;
  double warmup_epochs = 5.0;
  double total_epochs = 90.0;
  double decay_interval_epochs = 2.0;
  std::int64_t steps_per_epoch = 1;

  double peak_lr() const noexcept {
    if (batch_size == reference_batch) return base_lr;
    return base_lr * static_cast<double>(batch_size) /
           static_cast<double>(reference_batch);
  }

  /// floor(total_epochs * steps_per_epoch).
  std::int64_t total_steps() const noexcept;

  /// Throws ConfigError on a broken invariant.
  void validate() const;
};

double lr_at(const ScheduleConfig& config, std::int64_t step);

/// Batch-size thresholds that select the warmup length and the terminal
/// learning rate. The defaults are the ImageNet-scale values; a run on a
/// smaller dataset may scale all of them by the same factor.
struct BatchRegimes {
  double small_batch_limit = 8192;  // batch < limit -> final_lr 0.001
  double large_batch_limit = 32768;
  double scale = 1.0;
};

/// Warmup of 5 epochs (batch <= 8192), 15 (<= 32768) or 30 (above);
/// final_lr 0.001 for batch < 8192 and 0.01 otherwise.
ScheduleConfig default_schedule_for(std::int64_t batch_size,
                                    double total_epochs,
                                    std::int64_t steps_per_epoch,
                                    const BatchRegimes& regimes = {});

/// Schedule that returns `lr` at every step.
ScheduleConfig constant_schedule(double lr, std::int64_t batch_size,
                                 double total_epochs,
                                 std::int64_t steps_per_epoch);

}  // namespace nlcg

#endif  // NLCG_SCHEDULE_HPP_
