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

#include "nlcg/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include "json.hpp"
#include "nlcg/batching.hpp"
#include "nlcg/errors.hpp"
#include "nlcg/run_log.hpp"
#include "nlcg/schedule.hpp"

namespace nlcg {

namespace fs = std::filesystem;

namespace {

QuadraticOptions quadratic_options(const ProblemSpec& spec, Spectrum fallback) {
  QuadraticOptions opts;
  opts.spectrum = fallback;
  if (spec.spectrum == "linear") opts.spectrum = Spectrum::linear;
  if (spec.spectrum == "geometric") opts.spectrum = Spectrum::geometric;
  opts.samples = spec.quadratic_samples;
  opts.noise = spec.quadratic_noise;
  return opts;
}

std::pair<Dataset, std::optional<Dataset>> load_classification(
    const ProblemSpec& spec) {
  Dataset all;
  if (spec.dataset == "csv") {
    all = load_csv_dataset(spec.dataset_path, spec.label_column);
  } else {
    all = make_synthetic_classification(spec.samples + spec.test_samples,
                                        spec.features, spec.classes,
                                        spec.separation, spec.data_seed);
  }
  if (spec.test_samples == 0) return {std::move(all), std::nullopt};
  auto [train, test] = split_tail(all, spec.test_samples);
  return {std::move(train), std::move(test)};
}

fs::path prepare_output_dir(const std::string& dir) {
  const fs::path path = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec || !fs::is_directory(path)) {
    throw DataError("cannot create output directory '" + path.string() + "'");
  }
  return path;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void write_summary_json(const RunSummary& s, const fs::path& path) {
  nlohmann::json doc = {
      {"run_name", s.run_name},
      {"optimizer", std::string(to_string(s.optimizer))},
      {"csv_path", s.csv_path},
      {"t_max", s.t_max},
      {"steps_completed", s.steps_completed},
      {"diverged", s.diverged},
      {"message", s.message},
      {"final_loss", optional_json(s.final_loss)},
      {"final_train_accuracy", optional_json(s.final_train_accuracy)},
      {"final_test_accuracy", optional_json(s.final_test_accuracy)},
      {"best_test_accuracy", optional_json(s.best_test_accuracy)},
      {"steps_to_target", s.steps_to_target ? nlohmann::json(*s.steps_to_target)
                                            : nlohmann::json(nullptr)},
  };
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("cannot write '" + path.string() + "'");
}

}  // namespace

BuiltProblem build_problem(const ProblemSpec& spec) {
  BuiltProblem built;
  if (spec.kind == "quadratic" || spec.kind == "diagonal_quadratic") {
    std::shared_ptr<QuadraticProblem> q;
    if (spec.kind == "quadratic") {
      q = make_quadratic(spec.dim, spec.condition_number, spec.data_seed,
                         quadratic_options(spec, Spectrum::linear));
    } else {
      q = make_diagonal_quadratic(spec.dim, spec.condition_number,
                                  spec.data_seed,
                                  quadratic_options(spec, Spectrum::geometric));
    }
    built.optimal_value = q->optimal_value();
    built.problem = std::move(q);
    return built;
  }

  auto [train, test] = load_classification(spec);
  auto train_ptr = std::make_shared<const Dataset>(std::move(train));
  built.train = train_ptr;
  if (test) built.test = std::make_shared<const Dataset>(std::move(*test));
  if (spec.kind == "logistic_regression") {
    built.problem = make_logistic_regression(train_ptr);
  } else if (spec.kind == "mlp") {
    built.problem = make_mlp(train_ptr, spec.hidden);
  } else {
    throw ConfigError("unknown problem kind '" + spec.kind + "'");
  }
  return built;
}

RunSummary run(const RunConfig& config, const StepObserver& observer) {
  config.validate();
  const BuiltProblem built = build_problem(config.problem);
  const Problem& problem = *built.problem;

  BatchPlanConfig plan_config;
  plan_config.dataset_size = problem.sample_count();
  plan_config.micro_batch_size = config.resolved_micro_batch();
  plan_config.virtual_factor = config.resolved_virtual_factor();
  plan_config.seed = config.shuffle_seed.value_or(config.seed);
  plan_config.allow_wraparound = config.allow_wraparound;
  BatchPlan plan(plan_config);

  const auto steps_per_epoch = static_cast<std::int64_t>(plan.steps_per_epoch());
  const ScheduleConfig schedule = resolve_schedule(config, steps_per_epoch);
  const std::int64_t t_max = schedule.total_steps();

  auto optimizer = make_optimizer(resolve_optimizer(config));
  const bool float32 = config.precision == Precision::float32;
  optimizer->set_float32_weights(float32);

  ParamVector weights = problem.initial_weights(config.seed);
  if (float32) round_to_float(weights);

  std::uint64_t batches_drawn = 0;
  const GradientFn eval = [&](const ParamVector& w) {
    auto micro = plan.next_batch();
    const std::uint64_t drop_seed = mix_seed(plan_config.seed, ++batches_drawn);
    micro = drop_micro_batches(std::move(micro), config.drop_fraction, drop_seed);
    return averaged_gradient(problem, w, micro, config.threads);
  };

  const fs::path dir = prepare_output_dir(config.output_dir);
  RunSummary summary;
  summary.run_name = config.resolved_run_name();
  summary.optimizer = config.optimizer;
  summary.t_max = t_max;
  summary.csv_path = (dir / (summary.run_name + ".csv")).string();
  RunLogWriter log(summary.csv_path);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  try {
    optimizer->prepare(weights, eval);
    for (std::int64_t step = 0; step < t_max; ++step) {
      const double lr = lr_at(schedule, step);
      const StepMetrics m = optimizer->step(weights, eval, lr);

      RunRow row;
      row.step = step;
      row.epoch = static_cast<double>(step + 1) /
                  static_cast<double>(steps_per_epoch);
      row.train_loss = m.loss;
      row.lr_global = m.lr_global;
      row.lr_scale = m.lr_scale;
      row.lr_effective = m.lr_effective;
      row.beta_raw = m.beta_raw;
      row.beta_clamped = m.beta_clamped;
      row.grad_norm = m.grad_norm;

      const bool last = step + 1 == t_max;
      const bool periodic =
          config.eval_every > 0 && (step + 1) % config.eval_every == 0;
      if (built.train && (last || periodic)) {
        row.train_accuracy = accuracy(problem, weights, *built.train);
        if (built.test) {
          row.test_accuracy = accuracy(problem, weights, *built.test);
          summary.best_test_accuracy =
              std::max(summary.best_test_accuracy.value_or(0.0),
                       *row.test_accuracy);
        }
      }
      row.wall_ms = elapsed_ms();
      log.append(row);
      summary.steps_completed = step + 1;
      if (observer) observer(step, weights);

      if (m.loss > config.divergence_loss) {
        summary.diverged = true;
        summary.message = "loss " + format_double(m.loss) +
                          " above divergence threshold at step " +
                          std::to_string(step);
        break;
      }
      if (config.target_gap && built.optimal_value) {
        const auto& q = static_cast<const QuadraticProblem&>(problem);
        if (q.value(weights) - *built.optimal_value <= *config.target_gap) {
          summary.steps_to_target = step + 1;
          break;
        }
      }
    }
  } catch (const NumericError& e) {
    summary.diverged = true;
    summary.message = e.what();
  }

  if (!summary.diverged) {
    try {
      summary.final_loss = problem.evaluate_all(weights).loss;
    } catch (const NumericError& e) {
      summary.diverged = true;
      summary.message = e.what();
    }
  }
  if (!summary.diverged && built.train) {
    summary.final_train_accuracy = accuracy(problem, weights, *built.train);
    if (built.test) {
      summary.final_test_accuracy = accuracy(problem, weights, *built.test);
    }
  }
  write_summary_json(summary, dir / (summary.run_name + ".summary.json"));
  return summary;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "batch_size") return SweepAxis::batch_size;
  if (name == "epochs") return SweepAxis::epochs;
  throw ConfigError("unknown sweep axis '" + std::string(name) +
                    "' (expected batch_size or epochs)");
}

std::string_view to_string(SweepAxis axis) noexcept {
  return axis == SweepAxis::batch_size ? "batch_size" : "epochs";
}

void SweepSpec::validate() const {
  if (values.empty() || optimizers.empty() || seeds.empty()) {
    throw ConfigError("sweep: values, optimizers and seeds must be non-empty");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("sweep: values must be positive");
    }
    if (axis == SweepAxis::batch_size && v != std::floor(v)) {
      throw ConfigError("sweep: batch sizes must be integers");
    }
  }
  if (jobs < 1) throw ConfigError("sweep: jobs must be >= 1");
}

std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

namespace {

std::string value_label(double v) { return format_double(v); }

void fill_stat(const std::vector<double>& xs, std::optional<double>& mean,
               std::optional<double>& stddev) {
  if (xs.empty()) return;
  const auto [m, s] = mean_and_std(xs);
  mean = m;
  stddev = s;
}

std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

SweepResult sweep(const RunConfig& base, const SweepSpec& spec) {
  spec.validate();
  const fs::path dir = prepare_output_dir(base.output_dir);
  const fs::path runs_dir = prepare_output_dir((dir / "runs").string());

  SweepResult result;
  for (double value : spec.values) {
    for (OptimizerKind opt : spec.optimizers) {
      for (std::uint64_t seed : spec.seeds) {
        result.runs.push_back({opt, value, seed, std::nullopt, {}});
      }
    }
  }

  auto execute = [&](SweepRun& r) {
    try {
      RunConfig c = base;
      c.optimizer = r.optimizer;
      c.seed = r.seed;
      c.shuffle_seed.reset();
      if (spec.axis == SweepAxis::batch_size) {
        c.batch_size = static_cast<std::size_t>(r.value);
      } else {
        c.epochs = r.value;
      }
      c.output_dir = runs_dir.string();
      c.run_name = std::string(to_string(r.optimizer)) + "_" +
                   std::string(to_string(spec.axis)) + value_label(r.value) +
                   "_s" + std::to_string(r.seed);
      r.summary = run(c);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(spec.jobs, result.runs.size());
  if (workers <= 1) {
    for (auto& r : result.runs) execute(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < result.runs.size(); i = next++) {
          execute(result.runs[i]);
        }
      });
    }
  }

  for (double value : spec.values) {
    for (OptimizerKind opt : spec.optimizers) {
      SweepPoint p;
      p.optimizer = opt;
      p.value = value;
      std::vector<double> loss, train_acc, test_acc;
      for (const auto& r : result.runs) {
        if (r.optimizer != opt || r.value != value) continue;
        ++p.runs;
        if (!r.summary) {
          ++p.failed;
          continue;
        }
        if (r.summary->diverged) {
          ++p.diverged;
          continue;
        }
        if (r.summary->final_loss) loss.push_back(*r.summary->final_loss);
        if (r.summary->final_train_accuracy) {
          train_acc.push_back(*r.summary->final_train_accuracy);
        }
        if (r.summary->final_test_accuracy) {
          test_acc.push_back(*r.summary->final_test_accuracy);
        }
      }
      fill_stat(loss, p.final_loss_mean, p.final_loss_std);
      fill_stat(train_acc, p.train_accuracy_mean, p.train_accuracy_std);
      fill_stat(test_acc, p.test_accuracy_mean, p.test_accuracy_std);
      result.points.push_back(p);
    }
  }

  result.summary_path = (dir / "summary.csv").string();
  std::ofstream out(result.summary_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + result.summary_path + "'");
  out << kSweepSummaryHeader << '\n';
  for (const auto& p : result.points) {
    out << to_string(p.optimizer) << ',' << to_string(spec.axis) << ','
        << format_double(p.value) << ',' << p.runs << ',' << p.diverged << ','
        << p.failed << ',' << cell(p.final_loss_mean) << ','
        << cell(p.final_loss_std) << ',' << cell(p.train_accuracy_mean) << ','
        << cell(p.train_accuracy_std) << ',' << cell(p.test_accuracy_mean)
        << ',' << cell(p.test_accuracy_std) << '\n';
  }
  out.flush();
  if (!out) throw DataError("write failed on '" + result.summary_path + "'");
  return result;
}

}  // namespace nlcg
