// Copyright 2026 The scoreci Authors
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

#ifndef SCORECI_COMMON_HPP_
#define SCORECI_COMMON_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace scoreci {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Errors raised when a numerical quantity leaves the finite range. The
// message carries the location (iteration, row, ...) of the first offender.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Observations of (X, Y, Z). Every matrix has one row per observation.
struct Dataset {
  Matrix x;
  Matrix y;
  Matrix z;
  // Ground truth for synthetic data: true when X is independent of Y given Z.
  std::optional<bool> ci_holds;

  Eigen::Index rows() const { return x.rows(); }
  // Throws std::invalid_argument if row counts disagree or any cell is not
  // finite.
  void validate() const;
};

// Throws std::invalid_argument with `what` if the condition fails.
inline void require(bool condition, const std::string& what) {
  if (!condition) throw std::invalid_argument(what);
}

}  // namespace scoreci

#endif  // SCORECI_COMMON_HPP_
