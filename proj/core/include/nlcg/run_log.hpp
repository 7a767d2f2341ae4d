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

#ifndef NLCG_RUN_LOG_HPP_
#define NLCG_RUN_LOG_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlcg {

/// One per-step row of a run log. Optional cells are written empty.
struct RunRow {
  std::int64_t step = 0;
  double epoch = 0.0;
  double train_loss = 0.0;
  double lr_global = 0.0;
  double lr_scale = 1.0;
  double lr_effective = 0.0;
  std::optional<double> beta_raw;
  std::optional<double> beta_clamped;
  double grad_norm = 0.0;
  double wall_ms = 0.0;
  std::optional<double> train_accuracy;
  std::optional<double> test_accuracy;

  friend bool operator==(const RunRow&, const RunRow&) = default;
};

/// Column names in file order.
inline constexpr std::string_view kRunLogHeader =
    "step,epoch,train_loss,lr_global,lr_scale,lr_effective,beta_raw,"
    "beta_clamped,grad_norm,wall_ms,train_accuracy,test_accuracy";

/// 17 significant digits, enough for any double to round-trip.
std::string format_double(double v);

std::string format_row(const RunRow& row);

/// Parses one data line. Throws DataError with `line_no` on malformed input.
RunRow parse_row(std::string_view line, std::size_t line_no = 0);

/**
 * Appends rows to a CSV file, flushing after each one so an interrupted run
 * leaves a well-formed prefix.
 */
class RunLogWriter {
 public:
  /// Truncates `path` and writes the header. Throws DataError on IO failure.
  explicit RunLogWriter(const std::string& path);

  void append(const RunRow& row);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::int64_t last_step_ = -1;
};

/// Reads a run log written by RunLogWriter (or any row-boundary prefix of
/// one). Throws DataError on a missing file, wrong header or bad row.
/// Reads a run log. A final line without its newline is a torn write from an
/// interrupted run and is dropped.
std::vector<RunRow> read_run_log(const std::string& path);

}  // namespace nlcg

#endif  // NLCG_RUN_LOG_HPP_
