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

#ifndef NLCG_BATCHING_HPP_
#define NLCG_BATCHING_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nlcg/numerics.hpp"
#include "nlcg/problems.hpp"

namespace nlcg {

using IndexSet = std::vector<std::size_t>;

struct BatchPlanConfig {
  std::size_t dataset_size = 0;
  std::size_t micro_batch_size = 1;
  /// Number of micro-batches averaged per step (simulated workers).
  std::size_t virtual_factor = 1;
  std::uint64_t seed = 0;
  /// Permit an effective batch larger than the dataset; such batches span
  /// several shuffled passes and may repeat samples.
  bool allow_wraparound = false;

  std::size_t effective_batch() const noexcept {
    return micro_batch_size * virtual_factor;
  }
  void validate() const;
};

/**
 * Epoch-based sampler without replacement. Each epoch draws a fresh
 * permutation derived from (seed, epoch); each step takes the next
 * effective_batch indices and splits them into virtual_factor disjoint
 * micro-batches. A tail shorter than one effective batch is skipped.
 */
class BatchPlan {
 public:
  explicit BatchPlan(BatchPlanConfig config);

  const BatchPlanConfig& config() const noexcept { return config_; }
  std::size_t effective_batch() const noexcept {
    return config_.effective_batch();
  }
  /// floor(dataset_size / effective_batch), or 1 under wraparound.
  std::size_t steps_per_epoch() const noexcept;

  /// Epoch of the most recently returned batch.
  std::uint64_t epoch() const noexcept { return epoch_; }
  /// Number of batches returned so far.
  std::uint64_t steps_taken() const noexcept { return steps_; }

  std::vector<IndexSet> next_batch();

 private:
  void reshuffle();
  std::size_t take_one();

  BatchPlanConfig config_;
  std::vector<std::size_t> permutation_;
  std::size_t cursor_ = 0;
  std::uint64_t epoch_ = 0;
  std::uint64_t steps_ = 0;
};

/// Discards floor(fraction * k) randomly chosen micro-batches (always keeping
/// at least one), mimicking an aggregator that proceeds without stragglers.
/// Order of the survivors is preserved.
std::vector<IndexSet> drop_micro_batches(std::vector<IndexSet> micro_batches,
                                         double fraction, std::uint64_t seed);

/**
 * Size-weighted mean loss and gradient over the micro-batches, identical
 * (up to rounding) to evaluating their union. With threads > 1 the
 * micro-batches are evaluated concurrently; the reduction always runs in
 * micro-batch order, so the result does not depend on `threads`.
 */
BatchEval averaged_gradient(const Problem& problem, const ParamVector& weights,
                            const std::vector<IndexSet>& micro_batches,
                            unsigned threads = 1);

/// Stateless 64-bit mixer used to derive per-epoch and per-step seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace nlcg

#endif  // NLCG_BATCHING_HPP_
