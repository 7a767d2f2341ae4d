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


// nlcg run --config FILE [--seed N] [--out DIR]
// nlcg sweep --config FILE --axis batch_size|epochs --values a,b,c
//            --optimizers sgd,nlcg_fr --seeds 0,1,2 [--jobs N] [--out DIR]

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlcg/errors.hpp"
#include "nlcg/harness.hpp"
#include "nlcg/run_config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void print_run(const nlcg::RunSummary& s) {
  std::cout << s.run_name << ": " << s.steps_completed << "/" << s.t_max
            << " steps";
  if (s.diverged) {
    std::cout << ", diverged (" << s.message << ")";
  } else if (s.final_loss) {
    std::cout << ", final loss " << *s.final_loss;
  }
  if (s.final_test_accuracy) {
    std::cout << ", test accuracy " << *s.final_test_accuracy;
  } else if (s.final_train_accuracy) {
    std::cout << ", train accuracy " << *s.final_train_accuracy;
  }
  if (s.steps_to_target) std::cout << ", target at step " << *s.steps_to_target;
  std::cout << "\n  log: " << s.csv_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preconditioned nonlinear CG and baseline optimizers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  auto* run_cmd = app.add_subcommand("run", "Train once from a config file");
  std::uint64_t seed = 0;
  run_cmd->add_option("--config", config_path, "JSON run config")
      ->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the seed");
  run_cmd->add_option("--out", out_dir, "Override the output directory");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run a grid of values x optimizers x seeds");
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> optimizers;
  std::vector<std::uint64_t> seeds;
  unsigned jobs = 1;
  sweep_cmd->add_option("--config", config_path, "JSON base config")
      ->required();
  sweep_cmd->add_option("--axis", axis, "batch_size or epochs")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated axis values")
      ->required()
      ->delimiter(',');
  sweep_cmd
      ->add_option("--optimizers", optimizers,
                   "sgd, momentum, rmsprop, nlcg_pr, nlcg_fr")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--seeds", seeds, "Comma-separated seeds")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--jobs", jobs, "Runs executed in parallel")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out_dir, "Override the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    nlcg::RunConfig config = nlcg::load_run_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;

    if (run_cmd->parsed()) {
      if (*seed_opt) config.seed = seed;
      print_run(nlcg::run(config));
      return 0;
    }

    nlcg::SweepSpec spec;
    spec.axis = nlcg::parse_sweep_axis(axis);
    spec.values = values;
    for (const auto& name : optimizers) {
      spec.optimizers.push_back(nlcg::parse_optimizer_kind(name));
    }
    spec.seeds = seeds;
    spec.jobs = jobs;
    const auto result = nlcg::sweep(config, spec);
    std::size_t failed = 0;
    for (const auto& r : result.runs) {
      if (r.summary) {
        print_run(*r.summary);
      } else {
        ++failed;
        std::cout << "run failed: " << r.error << "\n";
      }
    }
    std::cout << "summary: " << result.summary_path << " (" << result.runs.size()
              << " runs, " << failed << " failed)\n";
    return 0;
  } catch (const nlcg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlcg::DataError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
