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

#include "nlcg/run_log.hpp"

#include <array>
#include <charconv>

#include "nlcg/errors.hpp"

namespace nlcg {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

namespace {

void append_cell(std::string& line, double v) {
  line += ',';
  line += format_double(v);
}

void append_cell(std::string& line, const std::optional<double>& v) {
  line += ',';
  if (v) line += format_double(*v);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view cell, std::size_t line_no, const char* column) {
  T v{};
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw DataError("run log line " + std::to_string(line_no) +
                    ": bad value '" + std::string(cell) + "' in column " +
                    column);
  }
  return v;
}

std::optional<double> parse_optional(std::string_view cell, std::size_t line_no,
                                     const char* column) {
  if (cell.empty()) return std::nullopt;
  return parse_number<double>(cell, line_no, column);
}

}  // namespace

std::string format_row(const RunRow& row) {
  std::string line = std::to_string(row.step);
  append_cell(line, row.epoch);
  append_cell(line, row.train_loss);
  append_cell(line, row.lr_global);
  append_cell(line, row.lr_scale);
  append_cell(line, row.lr_effective);
  append_cell(line, row.beta_raw);
  append_cell(line, row.beta_clamped);
  append_cell(line, row.grad_norm);
  append_cell(line, row.wall_ms);
  append_cell(line, row.train_accuracy);
  append_cell(line, row.test_accuracy);
  return line;
}

RunRow parse_row(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto c = split(line);
  if (c.size() != 12) {
    throw DataError("run log line " + std::to_string(line_no) +
                    ": expected 12 cells, got " + std::to_string(c.size()));
  }
  RunRow row;
  row.step = parse_number<std::int64_t>(c[0], line_no, "step");
  row.epoch = parse_number<double>(c[1], line_no, "epoch");
  row.train_loss = parse_number<double>(c[2], line_no, "train_loss");
  row.lr_global = parse_number<double>(c[3], line_no, "lr_global");
  row.lr_scale = parse_number<double>(c[4], line_no, "lr_scale");
  row.lr_effective = parse_number<double>(c[5], line_no, "lr_effective");
  row.beta_raw = parse_optional(c[6], line_no, "beta_raw");
  row.beta_clamped = parse_optional(c[7], line_no, "beta_clamped");
  row.grad_norm = parse_number<double>(c[8], line_no, "grad_norm");
  row.wall_ms = parse_number<double>(c[9], line_no, "wall_ms");
  row.train_accuracy = parse_optional(c[10], line_no, "train_accuracy");
  row.test_accuracy = parse_optional(c[11], line_no, "test_accuracy");
  return row;
}

RunLogWriter::RunLogWriter(const std::string& path)
    : path_(path), out_(path, std::ios::out | std::ios::trunc | std::ios::binary) {
  if (!out_) throw DataError("cannot open run log '" + path + "' for writing");
  out_ << kRunLogHeader << '\n';
  out_.flush();
}

void RunLogWriter::append(const RunRow& row) {
  if (row.step <= last_step_) {
    throw DataError("run log: steps must be strictly increasing");
  }
  last_step_ = row.step;
  out_ << format_row(row) << '\n';
  out_.flush();
  if (!out_) throw DataError("write failed on run log '" + path_ + "'");
}

std::vector<RunRow> read_run_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open run log '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty run log");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunLogHeader) throw DataError(path + ": unexpected header");

  std::vector<RunRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (in.eof()) break;  // no newline: a torn final write
    if (line.empty()) continue;
    RunRow row = parse_row(line, line_no);
    if (!rows.empty() && row.step <= rows.back().step) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": step not increasing");
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nlcg
