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

#include "nlcg/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlcg/errors.hpp"

namespace nlcg {

std::int64_t ScheduleConfig::total_steps() const noexcept {
  return static_cast<std::int64_t>(
      std::floor(total_epochs * static_cast<double>(steps_per_epoch)));
}

void ScheduleConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("schedule: " + msg); };
  if (!(base_lr > 0.0)) fail("base_lr must be positive");
  if (reference_batch < 1) fail("reference_batch must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (steps_per_epoch < 1) fail("steps_per_epoch must be >= 1");
  if (!(decay_interval_epochs > 0.0)) fail("decay_interval_epochs must be positive");
  if (!(warmup_epochs >= 0.0)) fail("warmup_epochs must be >= 0");
  if (!(warmup_epochs < total_epochs)) fail("warmup_epochs must be < total_epochs");
  if (total_steps() < 1) fail("schedule covers no steps");
  const double peak = peak_lr();
  if (!(initial_lr > 0.0 && initial_lr <= peak)) {
    fail("need 0 < initial_lr <= peak_lr (" + std::to_string(peak) + ")");
  }
  if (!(final_lr > 0.0 && final_lr <= peak)) {
    fail("need 0 < final_lr <= peak_lr (" + std::to_string(peak) + ")");
  }
}

double lr_at(const ScheduleConfig& config, std::int64_t step) {
  config.validate();
  if (step < 0) throw ConfigError("lr_at: negative step");

  const double peak = config.peak_lr();
  const auto spe = static_cast<double>(config.steps_per_epoch);
  const double warmup_steps = config.warmup_epochs * spe;
  const auto t = static_cast<double>(step);
  if (t < warmup_steps) {
    return config.initial_lr + (peak - config.initial_lr) * (t / warmup_steps);
  }

  const double interval = config.decay_interval_epochs * spe;
  const auto last = static_cast<double>(config.total_steps() - 1);
  const double last_decays = std::floor((last - warmup_steps) / interval);
  const double decays = std::floor((t - warmup_steps) / interval);
  if (t >= last) return config.final_lr;
  // A decay phase shorter than one interval holds the peak until the end.
  if (last_decays < 1.0) return peak;
  const double lr =
      peak * std::pow(config.final_lr / peak, decays / last_decays);
  return std::clamp(lr, config.final_lr, peak);
}

ScheduleConfig default_schedule_for(std::int64_t batch_size,
                                    double total_epochs,
                                    std::int64_t steps_per_epoch,
                                    const BatchRegimes& regimes) {
  if (batch_size < 1 || !(total_epochs > 0.0) || steps_per_epoch < 1) {
    throw ConfigError("default_schedule_for: arguments must be positive");
  }
  if (!(regimes.scale > 0.0)) {
    throw ConfigError("default_schedule_for: regime scale must be positive");
  }
  const auto batch = static_cast<double>(batch_size);
  const double small = regimes.small_batch_limit * regimes.scale;
  const double large = regimes.large_batch_limit * regimes.scale;

  ScheduleConfig config;
  config.batch_size = batch_size;
  config.total_epochs = total_epochs;
  config.steps_per_epoch = steps_per_epoch;
  config.warmup_epochs = batch <= small ? 5.0 : (batch <= large ? 15.0 : 30.0);
  config.final_lr = batch < small ? 0.001 : 0.01;
  // Very small batches have a peak below the nominal endpoints.
  config.initial_lr = std::min(config.initial_lr, config.peak_lr());
  config.final_lr = std::min(config.final_lr, config.peak_lr());
  return config;
}

ScheduleConfig constant_schedule(double lr, std::int64_t batch_size,
                                 double total_epochs,
                                 std::int64_t steps_per_epoch) {
  ScheduleConfig config;
  config.base_lr = lr;
  config.reference_batch = batch_size;
  config.batch_size = batch_size;
  config.initial_lr = lr;
  config.final_lr = lr;
  config.warmup_epochs = 0.0;
  config.total_epochs = total_epochs;
  config.steps_per_epoch = steps_per_epoch;
  return config;
}

}  // namespace nlcg
