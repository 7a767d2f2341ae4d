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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nlcg/errors.hpp"
#include "nlcg/run_log.hpp"
#include "test_support.hpp"

namespace nlcg {
namespace {

RunRow sample_row(std::int64_t step) {
  RunRow r;
  r.step = step;
  r.epoch = 0.1 * static_cast<double>(step + 1);
  r.train_loss = 2.302585092994046 / (1.0 + static_cast<double>(step));
  r.lr_global = 0.1 / 3.0;
  r.lr_scale = 0.975;
  r.lr_effective = r.lr_global * r.lr_scale;
  r.beta_raw = -0.123456789012345678;
  r.beta_clamped = 0.0;
  r.grad_norm = 1e-300;
  r.wall_ms = 12.5;
  if (step % 2 == 1) {
    r.train_accuracy = 0.8125;
    r.test_accuracy = 2.0 / 3.0;
  }
  return r;
}

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
    const auto text = format_double(v);
    EXPECT_EQ(std::stod(text), v) << text;
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(RunRow, FormatParseRoundTrip) {
  for (std::int64_t s = 0; s < 4; ++s) {
    const auto row = sample_row(s);
    EXPECT_EQ(parse_row(format_row(row), 2), row);
  }
}

TEST(RunRow, OptionalCellsAreEmpty) {
  RunRow r;
  const auto line = format_row(r);
  EXPECT_EQ(line, "0,0,0,0,1,0,,,0,0,,");
  const auto back = parse_row(line);
  EXPECT_FALSE(back.beta_raw);
  EXPECT_FALSE(back.test_accuracy);
}

TEST(RunRow, MalformedLines) {
  EXPECT_THROW(parse_row("1,2,3", 4), DataError);
  EXPECT_THROW(parse_row("x,0,0,0,1,0,,,0,0,,", 4), DataError);
  EXPECT_THROW(parse_row("0,0,,0,1,0,,,0,0,,", 4), DataError);
  try {
    parse_row("1,2", 17);
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 17"), std::string::npos);
  }
}

TEST(RunLogWriter, HeaderAndRows) {
  const auto path = testing::scratch_dir("runlog") / "a.csv";
  {
    RunLogWriter log(path.string());
    for (std::int64_t s = 0; s < 5; ++s) log.append(sample_row(s));
    EXPECT_THROW(log.append(sample_row(4)), DataError);
  }
  const auto text = testing::read_file(path);
  EXPECT_EQ(text.substr(0, kRunLogHeader.size()), kRunLogHeader);
  const auto rows = read_run_log(path.string());
  ASSERT_EQ(rows.size(), 5u);
  for (std::int64_t s = 0; s < 5; ++s) EXPECT_EQ(rows[s], sample_row(s));
}

TEST(RunLogWriter, EveryRowBoundaryPrefixParses) {
  const auto dir = testing::scratch_dir("prefix");
  const auto path = dir / "full.csv";
  {
    RunLogWriter log(path.string());
    for (std::int64_t s = 0; s < 6; ++s) log.append(sample_row(s));
  }
  const auto text = testing::read_file(path);
  std::size_t rows = 0;
  for (std::size_t pos = text.find('\n'); pos != std::string::npos;
       pos = text.find('\n', pos + 1)) {
    const auto cut = dir / ("cut" + std::to_string(rows) + ".csv");
    testing::write_file(cut, text.substr(0, pos + 1));
    EXPECT_EQ(read_run_log(cut.string()).size(), rows);
    ++rows;
  }
}

TEST(RunLogWriter, CutAtAnyByteKeepsCompleteRows) {
  const auto dir = testing::scratch_dir("torn");
  const auto path = dir / "full.csv";
  {
    RunLogWriter log(path.string());
    for (std::int64_t s = 0; s < 4; ++s) log.append(sample_row(s));
  }
  const auto text = testing::read_file(path);
  const auto header_end = text.find('\n') + 1;
  for (std::size_t cut = header_end; cut <= text.size(); ++cut) {
    const auto prefix = text.substr(0, cut);
    const auto complete = static_cast<std::size_t>(
        std::count(prefix.begin(), prefix.end(), '\n') - 1);
    testing::write_file(dir / "cut.csv", prefix);
    const auto rows = read_run_log((dir / "cut.csv").string());
    ASSERT_EQ(rows.size(), complete) << cut;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i], sample_row(static_cast<std::int64_t>(i)));
    }
  }
}

TEST(ReadRunLog, Rejections) {
  const auto dir = testing::scratch_dir("reject");
  EXPECT_THROW(read_run_log((dir / "missing.csv").string()), DataError);
  testing::write_file(dir / "empty.csv", "");
  EXPECT_THROW(read_run_log((dir / "empty.csv").string()), DataError);
  testing::write_file(dir / "hdr.csv", "step,loss\n");
  EXPECT_THROW(read_run_log((dir / "hdr.csv").string()), DataError);
  const std::string header(kRunLogHeader);
  testing::write_file(dir / "order.csv", header + "\n" + format_row(sample_row(3)) +
                                             "\n" + format_row(sample_row(1)) + "\n");
  EXPECT_THROW(read_run_log((dir / "order.csv").string()), DataError);
}

TEST(RunLogWriter, UnwritablePath) {
  EXPECT_THROW(RunLogWriter("/nonexistent/dir/run.csv"), DataError);
}

}  // namespace
}  // namespace nlcg
