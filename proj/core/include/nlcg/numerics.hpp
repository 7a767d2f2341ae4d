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

#ifndef NLCG_NUMERICS_HPP_
#define NLCG_NUMERICS_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace nlcg {

/**
 * Flat vector over the full weight space of a problem.
 *
 * Weights, gradients, search directions and preconditioner diagonals all
 * live in this one representation; every optimizer works on the
 * concatenation of all model parameters rather than per-tensor blocks.
 */
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

  static ParamVector zeros(std::size_t n) { return ParamVector(n, 0.0); }
  static ParamVector ones(std::size_t n) { return ParamVector(n, 1.0); }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

/// Throws DimensionError unless a and b have equal length.
void require_same_size(const ParamVector& a, const ParamVector& b,
                       std::string_view what);

/// Throws NumericError naming `context` if any entry is NaN or Inf.
void require_finite(const ParamVector& v, std::string_view context);

bool all_finite(const ParamVector& v) noexcept;

/// Inner product. Throws on length mismatch or a non-finite result.
double dot(const ParamVector& a, const ParamVector& b);

/// Euclidean norm.
double norm(const ParamVector& a);

/// Returns alpha * x + y.
ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y);

/// Elementwise product; with diagonal matrices stored as vectors this is
/// also the matrix product.
ParamVector hadamard(const ParamVector& a, const ParamVector& b);

/// Elementwise 1 / max(a_i, floor). Output entries lie in (0, 1/floor].
ParamVector reciprocal_clamped(const ParamVector& a, double floor);

ParamVector scaled(double alpha, const ParamVector& x);

/// Returns a - b.
ParamVector difference(const ParamVector& a, const ParamVector& b);

/// Rounds every entry through 32-bit float storage.
void round_to_float(ParamVector& v) noexcept;

}  // namespace nlcg

#endif  // NLCG_NUMERICS_HPP_
