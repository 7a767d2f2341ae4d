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

#include "nlcg/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string_view>
#include <unordered_map>

#include "nlcg/errors.hpp"

namespace nlcg {

void Dataset::validate() const {
  if (labels.empty()) throw DataError(name + ": no samples");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError(name + ": feature rows and label count differ");
  }
  if (num_classes < 1) throw DataError(name + ": num_classes must be >= 1");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw DataError(name + ": label out of range at sample " +
                      std::to_string(i));
    }
  }
  if (!features.allFinite()) throw DataError(name + ": non-finite feature");
}

Dataset make_synthetic_classification(std::size_t num_samples,
                                      std::size_t feature_dim, int num_classes,
                                      double separation, std::uint64_t seed) {
  if (num_samples < 1 || feature_dim < 1) {
    throw ConfigError("synthetic classification: counts must be >= 1");
  }
  if (num_classes < 2) {
    throw ConfigError("synthetic classification: need at least 2 classes");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw ConfigError("synthetic classification: separation must be >= 0");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  FeatureMatrix means(num_classes, feature_dim);
  for (Eigen::Index c = 0; c < means.rows(); ++c) {
    for (Eigen::Index j = 0; j < means.cols(); ++j) {
      means(c, j) = separation * normal(rng);
    }
  }

  Dataset data;
  data.name = "synthetic";
  data.num_classes = num_classes;
  data.features.resize(static_cast<Eigen::Index>(num_samples),
                       static_cast<Eigen::Index>(feature_dim));
  data.labels.resize(num_samples);
  // Round-robin labels keep the classes balanced up to rounding, and any
  // contiguous tail (see split_tail) stays balanced as well.
  for (std::size_t i = 0; i < num_samples; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(num_classes));
    data.labels[i] = label;
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
      data.features(row, j) = means(label, j) + normal(rng);
    }
  }
  return data;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

}  // namespace

Dataset load_csv_dataset(const std::string& path,
                         const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": missing header row");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  const auto header = split_commas(line);
  std::size_t label_index = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_index = i;
  }
  if (label_index == header.size()) {
    throw DataError(path + ": label column '" + label_column + "' not found");
  }
  const std::size_t feature_dim = header.size() - 1;

  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_ids;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    const auto where = path + ":" + std::to_string(line_no) + ": ";
    if (cells.size() != header.size()) {
      throw DataError(where + "malformed row: expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto cell = cells[i];
      if (i == label_index) {
        std::string key(cell);
        auto [it, inserted] =
            class_ids.try_emplace(key, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(key);
        labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      const auto* end = cell.data() + cell.size();
      const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (ec != std::errc() || ptr != end || cell.empty()) {
        throw DataError(where + "malformed row: non-numeric value '" +
                        std::string(cell) + "' in column '" +
                        std::string(header[i]) + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(where + "malformed row: non-finite value in column '" +
                        std::string(header[i]) + "'");
      }
      values.push_back(v);
    }
  }
  if (labels.empty()) throw DataError(path + ": no samples");

  Dataset data;
  data.name = path;
  data.num_classes = static_cast<int>(class_names.size());
  data.class_names = std::move(class_names);
  data.labels = std::move(labels);
  data.features = Eigen::Map<const FeatureMatrix>(
      values.data(), static_cast<Eigen::Index>(data.labels.size()),
      static_cast<Eigen::Index>(feature_dim));
  return data;
}

std::pair<Dataset, Dataset> split_tail(const Dataset& data, std::size_t count) {
  if (count >= data.num_samples()) {
    throw ConfigError("split_tail: held-out count must leave training samples");
  }
  const auto n_train = static_cast<Eigen::Index>(data.num_samples() - count);
  const auto n_test = static_cast<Eigen::Index>(count);
  Dataset train;
  Dataset test;
  for (Dataset* part : {&train, &test}) {
    part->num_classes = data.num_classes;
    part->class_names = data.class_names;
  }
  train.name = data.name + "/train";
  test.name = data.name + "/test";
  train.features = data.features.topRows(n_train);
  test.features = data.features.bottomRows(n_test);
  train.labels.assign(data.labels.begin(), data.labels.begin() + n_train);
  test.labels.assign(data.labels.begin() + n_train, data.labels.end());
  return {std::move(train), std::move(test)};
}

}  // namespace nlcg
