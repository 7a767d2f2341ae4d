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

#include "nlcg/batching.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "nlcg/errors.hpp"

namespace nlcg {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void BatchPlanConfig::validate() const {
  if (dataset_size < 1) throw ConfigError("batch plan: empty dataset");
  if (micro_batch_size < 1) throw ConfigError("batch plan: micro_batch_size must be >= 1");
  if (virtual_factor < 1) throw ConfigError("batch plan: virtual_factor must be >= 1");
  if (effective_batch() > dataset_size && !allow_wraparound) {
    throw ConfigError("batch plan: effective batch " +
                      std::to_string(effective_batch()) +
                      " exceeds dataset size " + std::to_string(dataset_size) +
                      " (enable wraparound to allow it)");
  }
}

BatchPlan::BatchPlan(BatchPlanConfig config) : config_(config) {
  config_.validate();
  permutation_.resize(config_.dataset_size);
  reshuffle();
}

std::size_t BatchPlan::steps_per_epoch() const noexcept {
  return std::max<std::size_t>(1, config_.dataset_size / effective_batch());
}

void BatchPlan::reshuffle() {
  std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
  std::mt19937_64 rng(mix_seed(config_.seed, epoch_));
  std::shuffle(permutation_.begin(), permutation_.end(), rng);
  cursor_ = 0;
}

std::size_t BatchPlan::take_one() {
  if (cursor_ == permutation_.size()) {
    ++epoch_;
    reshuffle();
  }
  return permutation_[cursor_++];
}

std::vector<IndexSet> BatchPlan::next_batch() {
  const std::size_t effective = effective_batch();
  if (effective <= config_.dataset_size &&
      cursor_ + effective > permutation_.size()) {
    ++epoch_;
    reshuffle();
  }
  std::vector<IndexSet> micro(config_.virtual_factor);
  for (auto& set : micro) {
    set.reserve(config_.micro_batch_size);
    for (std::size_t i = 0; i < config_.micro_batch_size; ++i) {
      set.push_back(take_one());
    }
  }
  ++steps_;
  return micro;
}

std::vector<IndexSet> drop_micro_batches(std::vector<IndexSet> micro_batches,
                                         double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ConfigError("drop_fraction must lie in [0, 1)");
  }
  const std::size_t k = micro_batches.size();
  std::size_t drop = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(k)));
  if (k == 0 || drop == 0) return micro_batches;
  drop = std::min(drop, k - 1);

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> keep(k, true);
  for (std::size_t i = 0; i < drop; ++i) keep[order[i]] = false;

  std::vector<IndexSet> kept;
  kept.reserve(k - drop);
  for (std::size_t i = 0; i < k; ++i) {
    if (keep[i]) kept.push_back(std::move(micro_batches[i]));
  }
  return kept;
}

namespace {

[[noreturn]] void rethrow_with_index(std::exception_ptr error, std::size_t i) {
  const std::string suffix = " (micro-batch " + std::to_string(i) + ")";
  try {
    std::rethrow_exception(error);
  } catch (const NumericError& e) {
    throw NumericError(e.what() + suffix);
  } catch (const IndexError& e) {
    throw IndexError(e.what() + suffix);
  } catch (const DimensionError& e) {
    throw DimensionError(e.what() + suffix);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what() + suffix);
  } catch (...) {
    throw;
  }
}

}  // namespace

BatchEval averaged_gradient(const Problem& problem, const ParamVector& weights,
                            const std::vector<IndexSet>& micro_batches,
                            unsigned threads) {
  if (micro_batches.empty()) throw ConfigError("averaged_gradient: no micro-batches");
  const std::size_t k = micro_batches.size();
  std::vector<BatchEval> evals(k);
  std::vector<std::exception_ptr> errors(k);

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < k; i += stride) {
      try {
        evals[i] = problem.evaluate(weights, micro_batches[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), k);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (errors[i]) rethrow_with_index(errors[i], i);
  }

  std::size_t total = 0;
  for (const auto& set : micro_batches) total += set.size();
  BatchEval out;
  out.gradient = ParamVector::zeros(weights.size());
  for (std::size_t i = 0; i < k; ++i) {
    const double weight = static_cast<double>(micro_batches[i].size()) /
                          static_cast<double>(total);
    out.loss += weight * evals[i].loss;
    for (std::size_t j = 0; j < out.gradient.size(); ++j) {
      out.gradient[j] += weight * evals[i].gradient[j];
    }
  }
  return out;
}

}  // namespace nlcg
