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

#ifndef NLCG_RUN_CONFIG_HPP_
#define NLCG_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlcg/linesearch.hpp"
#include "nlcg/optimizers.hpp"
#include "nlcg/preconditioner.hpp"
#include "nlcg/schedule.hpp"

namespace nlcg {

struct ProblemSpec {
  /// quadratic, diagonal_quadratic, logistic_regression or mlp.
  std::string kind = "mlp";

  // Quadratic family.
  std::size_t dim = 10;
  double condition_number = 100.0;
  /// linear or geometric; empty selects the generator's default.
  std::string spectrum;
  std::size_t quadratic_samples = 1;
  double quadratic_noise = 0.0;

  // Classification family.
  /// synthetic or csv.
  std::string dataset = "synthetic";
  std::string dataset_path;
  std::string label_column = "label";
  std::size_t samples = 1024;
  std::size_t features = 16;
  int classes = 10;
  double separation = 1.0;
  /// Extra samples drawn from the same clusters (or split off the tail of a
  /// CSV dataset) for test accuracy.
  std::size_t test_samples = 0;
  std::uint64_t data_seed = 0;
  std::vector<std::size_t> hidden{32};
};

enum class ScheduleMode { default_rule, custom, constant };
enum class LineSearchMode { automatic, on, off };
enum class Precision { float64, float32 };

/**
 * Everything one training run needs. Loaded from a flat JSON object whose
 * keys map one-to-one onto the fields below; unknown keys are rejected.
 */
struct RunConfig {
  ProblemSpec problem;

  OptimizerKind optimizer = OptimizerKind::nlcg_fr;
  FirstOrderConfig first_order;

  // Batching. When batch_size is set it overrides micro_batch_size and
  // virtual_factor: the micro-batch is min(batch_size, micro_batch_limit)
  // and the virtual factor makes up the rest.
  std::size_t micro_batch_size = 64;
  std::size_t virtual_factor = 1;
  std::optional<std::size_t> batch_size;
  std::size_t micro_batch_limit = 0;  // 0: unlimited
  double drop_fraction = 0.0;
  std::optional<std::uint64_t> shuffle_seed;  // defaults to seed
  bool allow_wraparound = false;

  // Schedule.
  ScheduleMode schedule = ScheduleMode::default_rule;
  double base_lr = 0.1;
  std::int64_t reference_batch = 256;
  double initial_lr = 0.001;
  double final_lr = 0.001;
  double warmup_epochs = 5.0;
  double decay_interval_epochs = 2.0;
  double constant_lr = 0.01;
  /// Multiplies every batch-size threshold (warmup/final-lr regimes and the
  /// line-search cutoff) for datasets smaller than the reference scale.
  double regime_scale = 1.0;

  // Line search.
  LineSearchMode line_search = LineSearchMode::automatic;
  double line_search_min_batch = 2048;
  LineSearchConfig line_search_params;

  // Preconditioner and NLCG switches.
  bool preconditioner = true;
  double curvature_floor = 1e-8;
  double skip_tolerance = 1e-12;
  bool force_zero_beta = false;

  double epochs = 10.0;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  std::string run_name;  // empty: derived from optimizer, batch and seed
  std::int64_t eval_every = 0;  // 0: only at the last step
  Precision precision = Precision::float64;
  unsigned threads = 1;
  /// A logged loss above this marks the run diverged.
  double divergence_loss = std::numeric_limits<double>::infinity();
  /// Quadratic problems only: stop once loss - optimum <= target_gap.
  std::optional<double> target_gap;

  /// Resolved micro-batch size and virtual factor.
  std::size_t resolved_micro_batch() const;
  std::size_t resolved_virtual_factor() const;
  std::size_t effective_batch() const {
    return resolved_micro_batch() * resolved_virtual_factor();
  }

  std::string resolved_run_name() const;

  /// Throws ConfigError on any invalid field combination that can be
  /// detected without building the problem.
  void validate() const;
};

/// Parses a flat JSON object. Throws ConfigError naming the offending key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Serializes every field, so parse_run_config(to_json(c)) reproduces c.
std::string to_json(const RunConfig& config);

/// Schedule used by a run once the steps per epoch are known.
ScheduleConfig resolve_schedule(const RunConfig& config,
                                std::int64_t steps_per_epoch);

/// Line-search settings after applying the automatic batch-size cutoff.
LineSearchConfig resolve_line_search(const RunConfig& config);

OptimizerConfig resolve_optimizer(const RunConfig& config);

}  // namespace nlcg

#endif  // NLCG_RUN_CONFIG_HPP_
