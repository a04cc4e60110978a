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

#include "scoreci/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "scoreci/detail/stats_internal.hpp"

namespace scoreci {
namespace detail {

Matrix pooled_rows(const Matrix& a, const Matrix& b) {
  Matrix pooled(a.rows() + b.rows(), a.cols());
  pooled.topRows(a.rows()) = a;
  pooled.bottomRows(b.rows()) = b;
  return pooled;
}

Matrix squared_distances(const Matrix& points) {
  const Eigen::Index n = points.rows();
  // Transposed copy so each point is contiguous.
  const Matrix pt = points.transpose();
  Matrix d2(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d2(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (pt.col(i) - pt.col(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

double median_nonzero_distance(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "median heuristic: column count mismatch");
  require(a.rows() + b.rows() >= 2,
          "median heuristic: need at least two pooled rows");
  // Above this many rows per side, an evenly strided subset of each side is
  // used. The rule treats both sides alike, so swapping them keeps the subset.
  constexpr Eigen::Index kMaxRowsPerSide = 2000;
  auto thin = [](const Matrix& m) {
    if (m.rows() <= kMaxRowsPerSide) return m;
    const Eigen::Index stride = (m.rows() + kMaxRowsPerSide - 1) / kMaxRowsPerSide;
    Matrix out((m.rows() + stride - 1) / stride, m.cols());
    for (Eigen::Index i = 0, r = 0; i < m.rows(); i += stride, ++r)
      out.row(r) = m.row(i);
    return out;
  };
  const Matrix pooled = pooled_rows(thin(a), thin(b));
  const Matrix pt = pooled.transpose();
  const Eigen::Index n = pooled.rows();
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (pt.col(i) - pt.col(j)).squaredNorm();
      if (v > 0.0) dist.push_back(v);
    }
  }
  if (dist.empty()) {
    throw std::invalid_argument(
        "median heuristic: all pooled points are identical");
  }
  // Median of squared distances, then sqrt (sqrt is monotone).
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid),
                   dist.end());
  double upper = dist[mid];
  double median = std::sqrt(upper);
  if (dist.size() % 2 == 0) {
    const double lower =
        *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (std::sqrt(lower) + std::sqrt(upper));
  }
  return median;
}

void gram_in_place(Matrix& d2, double bandwidth) {
  const double scale = -1.0 / (2.0 * bandwidth * bandwidth);
  d2 = (d2.array() * scale).exp().matrix();
}

BlockSums block_sums(const Matrix& gram, Eigen::Index n_a) {
  const Eigen::Index n = gram.rows();
  BlockSums s;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k = gram(i, j);
      const bool ia = i < n_a;
      const bool ja = j < n_a;
      if (ia && ja) {
        s.aa += k;
        if (i == j) s.aa_diag += k;
      } else if (!ia && !ja) {
        s.bb += k;
        if (i == j) s.bb_diag += k;
      } else if (ia && !ja) {
        s.ab += k;
      }
    }
  }
  return s;
}

Matrix whitened_basis(const Matrix& features, double ridge) {
  const Eigen::Index n = features.rows();
  const Eigen::Index k = features.cols();
  require(k >= 1, "cca: feature block has no columns");
  require(n > k, "cca: need more rows than features");
  require(ridge >= 0.0, "cca: ridge must be >= 0");
  Matrix augmented = Matrix::Zero(n + k, k);
  augmented.topRows(n) = features.rowwise() - features.colwise().mean();
  if (ridge > 0.0) {
    augmented.bottomRows(k).diagonal().setConstant(
        std::sqrt(ridge * static_cast<double>(n - 1)));
  }
  Eigen::JacobiSVD<Matrix> svd(augmented, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double tol = 1e-10 * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol && sv(rank) > 0.0) ++rank;
  if (rank == 0) {
    throw NumericalError(
        "cca: covariance is singular and the ridge cannot rescue it");
  }
  return svd.matrixU().topLeftCorner(n, rank);
}

double max_canonical_correlation(const Matrix& basis_f, const Matrix& basis_g) {
  require(basis_f.rows() == basis_g.rows(), "cca: row count mismatch");
  const Matrix cross = basis_f.transpose() * basis_g;
  // Smaller Gram side for the symmetric eigen-solve.
  const Matrix product = cross.rows() <= cross.cols()
                             ? Matrix(cross * cross.transpose())
                             : Matrix(cross.transpose() * cross);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(product, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("cca: eigen-solver did not converge");
  }
  const double top = eig.eigenvalues().maxCoeff();
  return std::clamp(std::sqrt(std::max(top, 0.0)), 0.0, 1.0);
}

}  // namespace detail

MmdEstimate mmd2(const Matrix& a, const Matrix& b, const KernelSpec& kernel) {
  require(a.cols() == b.cols(), "mmd: column count mismatch");
  require(a.rows() >= 1 && b.rows() >= 1, "mmd: both samples must be non-empty");
  MmdEstimate out;
  out.bandwidth = kernel.bandwidth ? *kernel.bandwidth
                                   : detail::median_nonzero_distance(a, b);
  require(out.bandwidth > 0.0, "mmd: bandwidth must be > 0");
  Matrix gram = detail::squared_distances(detail::pooled_rows(a, b));
  detail::gram_in_place(gram, out.bandwidth);
  const detail::BlockSums s = detail::block_sums(gram, a.rows());
  const double na = static_cast<double>(a.rows());
  const double nb = static_cast<double>(b.rows());
  out.biased = std::max(0.0, s.aa / (na * na) + s.bb / (nb * nb) -
                                 2.0 * s.ab / (na * nb));
  if (a.rows() >= 2 && b.rows() >= 2) {
    out.unbiased = (s.aa - s.aa_diag) / (na * (na - 1.0)) +
                   (s.bb - s.bb_diag) / (nb * (nb - 1.0)) -
                   2.0 * s.ab / (na * nb);
  }
  return out;
}

double median_heuristic(const Matrix& a, const Matrix& b) {
  return detail::median_nonzero_distance(a, b);
}

Matrix gaussian_gram(const Matrix& points, double bandwidth) {
  require(bandwidth > 0.0, "gram: bandwidth must be > 0");
  Matrix gram = detail::squared_distances(points);
  detail::gram_in_place(gram, bandwidth);
  return gram;
}

Vector copula_transform(const Vector& values) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
    return values(l) < values(r);
  });
  Vector out(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start + 1;
    while (end < n && values(order[end]) == values(order[start])) ++end;
    // Ranks start+1 .. end share their average.
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (Eigen::Index t = start; t < end; ++t) out(order[t]) = rank * inv_n;
    start = end;
  }
  return out;
}

void RdcSpec::validate() const {
  require(k >= 1, "rdc: k must be >= 1");
  require(s > 0.0, "rdc: s must be > 0");
  require(ridge >= 0.0, "rdc: ridge must be >= 0");
}

Matrix rdc_features(const Matrix& block, const RdcSpec& spec) {
  spec.validate();
  const Eigen::Index n = block.rows();
  const Eigen::Index d = block.cols();
  require(d >= 1, "rdc: block has no columns");
  Matrix copula(n, d + 1);
  for (Eigen::Index j = 0; j < d; ++j) copula.col(j) = copula_transform(block.col(j));
  copula.col(d).setOnes();

  // Weights depend on the block width only, never on the data. The last row
  // multiplies the ones column and acts as the phase.
  Engine engine(derive_seed(spec.seed, static_cast<std::uint64_t>(SeedStream::kStatistic),
                            static_cast<std::uint64_t>(d)));
  std::normal_distribution<double> normal(0.0, std::sqrt(spec.s));
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  Matrix weights(d + 1, spec.k);
  for (Eigen::Index c = 0; c < spec.k; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) weights(r, c) = normal(engine);
    weights(d, c) = phase(engine);
  }
  return (copula * weights).array().sin().matrix();
}

double cca_max_correlation(const Matrix& f, const Matrix& g, double ridge) {
  require(f.rows() == g.rows(), "cca: row count mismatch");
  return detail::max_canonical_correlation(detail::whitened_basis(f, ridge),
                                           detail::whitened_basis(g, ridge));
}

double rdc(const Matrix& x, const Matrix& y, const RdcSpec& spec) {
  spec.validate();
  require(x.rows() == y.rows(), "rdc: row count mismatch");
  if (x.rows() < spec.k + 2) {
    std::ostringstream msg;
    msg << "rdc: need at least k + 2 = " << spec.k + 2 << " rows, got "
        << x.rows();
    throw std::invalid_argument(msg.str());
  }
  return cca_max_correlation(rdc_features(x, spec), rdc_features(y, spec),
                             spec.ridge);
}

}  // namespace scoreci
