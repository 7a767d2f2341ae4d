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

#ifndef NLCG_DATASET_HPP_
#define NLCG_DATASET_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nlcg {

using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Labelled samples for classification problems. One row of `features` per
/// sample; labels are dense class ids in [0, num_classes).
struct Dataset {
  FeatureMatrix features;
  std::vector<int> labels;
  int num_classes = 0;
  std::string name;
  /// Original label text for datasets loaded from CSV, indexed by class id.
  std::vector<std::string> class_names;

  std::size_t num_samples() const noexcept { return labels.size(); }
  std::size_t feature_dim() const noexcept {
    return static_cast<std::size_t>(features.cols());
  }

  /// Throws DataError if any invariant is broken.
  void validate() const;
};

Dataset make_synthetic_classification(std::size_t num_samples,
                                      std::size_t feature_dim, int num_classes,
                                      double separation, std::uint64_t seed);

/// Reads a comma-separated file with one header row. The column named
/// `label_column` supplies class labels (mapped to ids in order of first
/// appearance); every other column must hold finite decimal numbers.
Dataset load_csv_dataset(const std::string& path,
                         const std::string& label_column);

/// Splits off the last `count` samples as a held-out set.
std::pair<Dataset, Dataset> split_tail(const Dataset& data, std::size_t count);

}  // namespace nlcg

#endif  // NLCG_DATASET_HPP_
