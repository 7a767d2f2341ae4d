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

#ifndef NLCG_ERRORS_HPP_
#define NLCG_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nlcg {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two weight-space vectors (or a vector and a problem) disagree on length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A NaN or Inf showed up where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing input data (CSV datasets, run logs).
class DataError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for this problem kind (e.g. accuracy on a quadratic).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

}  // namespace nlcg

#endif  // NLCG_ERRORS_HPP_
