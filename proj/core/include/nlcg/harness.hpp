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

#ifndef NLCG_HARNESS_HPP_
#define NLCG_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlcg/dataset.hpp"
#include "nlcg/numerics.hpp"
#include "nlcg/optimizers.hpp"
#include "nlcg/problems.hpp"
#include "nlcg/run_config.hpp"

namespace nlcg {

struct BuiltProblem {
  std::shared_ptr<const Problem> problem;
  std::shared_ptr<const Dataset> train;  // null for quadratics
  std::shared_ptr<const Dataset> test;   // null without test samples
  std::optional<double> optimal_value;   // quadratics only
};

BuiltProblem build_problem(const ProblemSpec& spec);

struct RunSummary {
  std::string run_name;
  OptimizerKind optimizer = OptimizerKind::sgd;
  std::string csv_path;
  std::int64_t t_max = 0;
  std::int64_t steps_completed = 0;
  bool diverged = false;
  std::string message;  // why the run diverged, if it did
  /// Loss over the whole training set at the final weights.
  std::optional<double> final_loss;
  std::optional<double> final_train_accuracy;
  std::optional<double> final_test_accuracy;
  std::optional<double> best_test_accuracy;
  /// Quadratics with target_gap set: steps taken to reach the gap.
  std::optional<std::int64_t> steps_to_target;
};

/// Called after every completed step with the updated weights.
using StepObserver =
    std::function<void(std::int64_t step, const ParamVector& weights)>;

/**
 * Runs one training job and writes `<output_dir>/<run name>.csv` plus a
 * `<run name>.summary.json` next to it.
 *
 * A non-finite loss or gradient, or a loss above divergence_loss, ends the
 * run early with diverged = true; the log keeps every completed step.
 * Config and IO problems throw.
 */
RunSummary run(const RunConfig& config, const StepObserver& observer = {});

enum class SweepAxis { batch_size, epochs };

SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis) noexcept;

struct SweepSpec {
  SweepAxis axis = SweepAxis::batch_size;
  std::vector<double> values;
  std::vector<OptimizerKind> optimizers;
  std::vector<std::uint64_t> seeds;
  unsigned jobs = 1;

  void validate() const;
};

/// Statistics over the seeds of one (optimizer, value) grid point.
/// Means and sample standard deviations cover non-diverged runs only.
struct SweepPoint {
  OptimizerKind optimizer = OptimizerKind::sgd;
  double value = 0.0;
  std::size_t runs = 0;
  std::size_t diverged = 0;
  std::size_t failed = 0;
  std::optional<double> final_loss_mean;
  std::optional<double> final_loss_std;
  std::optional<double> train_accuracy_mean;
  std::optional<double> train_accuracy_std;
  std::optional<double> test_accuracy_mean;
  std::optional<double> test_accuracy_std;
};

struct SweepRun {
  OptimizerKind optimizer = OptimizerKind::sgd;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::optional<RunSummary> summary;  // empty if the run threw
  std::string error;
};

struct SweepResult {
  std::vector<SweepRun> runs;  // grid order: value, optimizer, seed
  std::vector<SweepPoint> points;
  std::string summary_path;
};

inline constexpr std::string_view kSweepSummaryHeader =
    "optimizer,axis,value,runs,diverged,failed,final_loss_mean,"
    "final_loss_std,train_accuracy_mean,train_accuracy_std,"
    "test_accuracy_mean,test_accuracy_std";

/**
 * Runs the grid values x optimizers x seeds. Run logs go to
 * `<output_dir>/runs/`, the table to `<output_dir>/summary.csv`. A run that
 * throws is counted as failed and the sweep moves on.
 */
SweepResult sweep(const RunConfig& base, const SweepSpec& spec);

/// Sample mean and standard deviation (n - 1 denominator; 0 for n = 1).
std::pair<double, double> mean_and_std(const std::vector<double>& xs);

}  // namespace nlcg

#endif  // NLCG_HARNESS_HPP_
