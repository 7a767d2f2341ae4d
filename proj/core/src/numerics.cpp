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

#include "nlcg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlcg/errors.hpp"

namespace nlcg {

void require_same_size(const ParamVector& a, const ParamVector& b,
                       std::string_view what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

bool all_finite(const ParamVector& v) noexcept {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

void require_finite(const ParamVector& v, std::string_view context) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw NumericError(std::string(context) + ": non-finite entry at index " +
                         std::to_string(i));
    }
  }
}

double dot(const ParamVector& a, const ParamVector& b) {
  require_same_size(a, b, "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  if (!std::isfinite(sum)) throw NumericError("dot: non-finite result");
  return sum;
}

double norm(const ParamVector& a) { return std::sqrt(dot(a, a)); }

ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y) {
  require_same_size(x, y, "axpy");
  ParamVector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = alpha * x[i] + y[i];
  require_finite(out, "axpy");
  return out;
}

ParamVector hadamard(const ParamVector& a, const ParamVector& b) {
  require_same_size(a, b, "hadamard");
  ParamVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ParamVector reciprocal_clamped(const ParamVector& a, double floor) {
  if (!(floor > 0.0) || !std::isfinite(floor)) {
    throw ConfigError("reciprocal_clamped: floor must be positive and finite");
  }
  ParamVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    // floor first: std::max(floor, NaN) yields floor.
    out[i] = 1.0 / std::max(floor, a[i]);
  }
  return out;
}

ParamVector scaled(double alpha, const ParamVector& x) {
  ParamVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i];
  return out;
}

ParamVector difference(const ParamVector& a, const ParamVector& b) {
  require_same_size(a, b, "difference");
  ParamVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

void round_to_float(ParamVector& v) noexcept {
  for (double& x : v) x = static_cast<double>(static_cast<float>(x));
}

}  // namespace nlcg
