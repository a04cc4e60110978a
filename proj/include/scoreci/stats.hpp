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

#ifndef SCORECI_STATS_HPP_
#define SCORECI_STATS_HPP_

#include <optional>

#include "scoreci/common.hpp"
#include "scoreci/rng.hpp"

namespace scoreci {

// Gaussian kernel exp(-|u - w|^2 / (2 sigma^2)). An empty bandwidth means
// the median heuristic on the pooled sample.
struct KernelSpec {
  std::optional<double> bandwidth;
};

struct MmdEstimate {
  // V-statistic over the full Gram blocks, clamped at zero.
  double biased = 0.0;
  // U-statistic (diagonals excluded); absent when either sample has fewer
  // than two rows.
  std::optional<double> unbiased;
  double bandwidth = 0.0;
};

// Rows are observations. Throws on column mismatch or an empty sample.
MmdEstimate mmd2(const Matrix& a, const Matrix& b, const KernelSpec& kernel);

// Median of the nonzero pairwise Euclidean distances of the pooled rows.
// Throws if every pooled row is identical.
double median_heuristic(const Matrix& a, const Matrix& b);

// Gram matrix of the rows of `points` for the given bandwidth.
Matrix gaussian_gram(const Matrix& points, double bandwidth);

// rank(value_i) / n with average ranks for ties.
Vector copula_transform(const Vector& values);

struct RdcSpec {
  // Random sine features per side.
  int k = 20;
  // Feature scale: projection weights are N(0, s), phases Uniform[-pi, pi].
  double s = 1.0 / 6.0;
  double ridge = 1e-6;
  Seed seed = 0;

  void validate() const;
};

// Random sine features of one variable block: copula-transform every column,
// append a constant column and map through sin(U W). W depends only on
// (spec.seed, column count), so two blocks with the same width share W and
// rdc(x, y) == rdc(y, x).
Matrix rdc_features(const Matrix& block, const RdcSpec& spec);

// Largest canonical correlation between two feature blocks (n x k_f and
// n x k_g), with `ridge` added to both within-block covariances. Columns are
// centered internally. Requires n > max(k_f, k_g).
double cca_max_correlation(const Matrix& f, const Matrix& g, double ridge);

// Randomized dependence coefficient in [0, 1]; requires n >= k + 2.
double rdc(const Matrix& x, const Matrix& y, const RdcSpec& spec);

}  // namespace scoreci

#endif  // SCORECI_STATS_HPP_
