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

#include "scoreci/gof.hpp"

#include <algorithm>
#include <numeric>

#include "scoreci/detail/stats_internal.hpp"

namespace scoreci {

void GofConfig::validate() const {
  require(num_permutations >= 19, "gof: num_permutations must be >= 19");
  require(alpha > 0.0 && alpha < 1.0, "gof: alpha must lie in (0, 1)");
}

Matrix join_columns(const Matrix& x, const Matrix& z) {
  require(x.rows() == z.rows(), "join_columns: row count mismatch");
  Matrix out(x.rows(), x.cols() + z.cols());
  out.leftCols(x.cols()) = x;
  out.rightCols(z.cols()) = z;
  return out;
}

GofResult gof_test(const Matrix& observed_xz, const Matrix& generated_xz,
                   int num_permutations, double alpha, Seed seed,
                   int threads) {
  require(observed_xz.cols() == generated_xz.cols(),
          "gof: observed and generated column counts differ");
  require(observed_xz.rows() >= 10 && generated_xz.rows() >= 10,
          "gof: need at least 10 rows per sample");
  require(num_permutations >= 19, "gof: num_permutations must be >= 19");
  require(alpha > 0.0 && alpha < 1.0, "gof: alpha must lie in (0, 1)");

  GofResult out;
  out.num_permutations = num_permutations;
  out.alpha = alpha;
  out.bandwidth = detail::median_nonzero_distance(observed_xz, generated_xz);

  const Eigen::Index na = observed_xz.rows();
  const Eigen::Index nb = generated_xz.rows();
  const Eigen::Index total = na + nb;
  Matrix gram =
      detail::squared_distances(detail::pooled_rows(observed_xz, generated_xz));
  detail::gram_in_place(gram, out.bandwidth);

  const double ina = 1.0 / static_cast<double>(na);
  const double inb = 1.0 / static_cast<double>(nb);
  auto statistic = [&](double s_aa, double s_bb, double s_ab) {
    return std::max(0.0, s_aa * ina * ina + s_bb * inb * inb -
                             2.0 * s_ab * ina * inb);
  };
  const detail::BlockSums observed = detail::block_sums(gram, na);
  out.mmd_observed = statistic(observed.aa, observed.bb, observed.ab);

  const double gram_total = gram.sum();
  const auto num = static_cast<std::size_t>(num_permutations);
  out.permutation_stats.assign(num, 0.0);
  // Column p of `in_a` marks the rows permutation p assigns to the first
  // sample; all row sums then come from one product with the Gram matrix.
  Matrix in_a = Matrix::Zero(total, num_permutations);
  parallel_for(num, threads, [&](std::size_t p) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Engine engine(derive_seed(seed, p));
    std::shuffle(order.begin(), order.end(), engine);
    const auto col = static_cast<Eigen::Index>(p);
    for (Eigen::Index t = 0; t < na; ++t) in_a(order[t], col) = 1.0;
  });
  Matrix row_sums_a(total, num_permutations);
  row_sums_a.noalias() = gram.selfadjointView<Eigen::Lower>() * in_a;
  for (Eigen::Index p = 0; p < num_permutations; ++p) {
    const double s_aa = in_a.col(p).dot(row_sums_a.col(p));
    const double s_ab = row_sums_a.col(p).sum() - s_aa;
    const double s_bb = gram_total - s_aa - 2.0 * s_ab;
    out.permutation_stats[static_cast<std::size_t>(p)] = statistic(s_aa, s_bb, s_ab);
  }

  const auto exceed = std::count_if(
      out.permutation_stats.begin(), out.permutation_stats.end(),
      [&](double v) { return v >= out.mmd_observed; });
  out.p_value = static_cast<double>(1 + exceed) /
                static_cast<double>(1 + num_permutations);
  out.pass = out.p_value > alpha;
  return out;
}

GofSummary summarize_gof(std::vector<GofResult> results) {
  require(!results.empty(), "gof: no results to summarize");
  GofSummary out;
  std::vector<double> p;
  p.reserve(results.size());
  for (const auto& r : results) p.push_back(r.p_value);
  std::sort(p.begin(), p.end());
  out.min_p_value = p.front();
  const std::size_t mid = p.size() / 2;
  out.median_p_value = p.size() % 2 ? p[mid] : 0.5 * (p[mid - 1] + p[mid]);
  out.per_set = std::move(results);
  return out;
}

}  // namespace scoreci
