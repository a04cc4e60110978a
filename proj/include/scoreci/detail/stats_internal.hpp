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

// Building blocks shared by the statistics, the GOF test and the CI
// statistics. Not part of the public surface.

#ifndef SCORECI_DETAIL_STATS_INTERNAL_HPP_
#define SCORECI_DETAIL_STATS_INTERNAL_HPP_

#include "scoreci/common.hpp"

namespace scoreci::detail {

Matrix pooled_rows(const Matrix& a, const Matrix& b);

// Symmetric matrix of squared Euclidean distances between rows.
Matrix squared_distances(const Matrix& points);

double median_nonzero_distance(const Matrix& a, const Matrix& b);

// Maps squared distances to Gaussian kernel values.
void gram_in_place(Matrix& d2, double bandwidth);

// Sums over the Gram blocks when the first n_a rows form sample A.
struct BlockSums {
  double aa = 0.0;
  double bb = 0.0;
  double ab = 0.0;
  double aa_diag = 0.0;
  double bb_diag = 0.0;
};
BlockSums block_sums(const Matrix& gram, Eigen::Index n_a);

// Top n rows of an orthonormal basis of [F - mean; sqrt(ridge (n - 1)) I].
// For two blocks the ridge-regularized canonical correlations are the
// singular values of basis_f^T basis_g.
Matrix whitened_basis(const Matrix& features, double ridge);

double max_canonical_correlation(const Matrix& basis_f, const Matrix& basis_g);

}  // namespace scoreci::detail

#endif  // SCORECI_DETAIL_STATS_INTERNAL_HPP_
