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

// Goodness-of-fit check of generated samples: a permutation two-sample test
// of observed (X, Z) rows against generated (X~, Z) rows with the biased
// MMD^2 statistic and a pooled median-heuristic bandwidth.

#ifndef SCORECI_GOF_HPP_
#define SCORECI_GOF_HPP_

#include <vector>

#include "scoreci/common.hpp"
#include "scoreci/rng.hpp"

namespace scoreci {

struct GofConfig {
  bool enabled = true;
  int num_permutations = 199;
  double alpha = 0.05;
  // Strict mode turns a failed check into a pipeline error.
  bool strict = false;
  // Test every generated set instead of only the first.
  bool all_sets = false;
  int threads = 1;

  void validate() const;
};

struct GofResult {
  double mmd_observed = 0.0;
  // (1 + #{perm stat >= observed}) / (1 + num_permutations)
  double p_value = 1.0;
  int num_permutations = 0;
  bool pass = true;
  double alpha = 0.05;
  double bandwidth = 0.0;
  std::vector<double> permutation_stats;
};

// Requires matching column counts, at least 10 rows in each sample and at
// least 19 permutations. Permutation p re-splits the pooled rows with an
// engine seeded by derive_seed(seed, p), so the result is independent of
// thread count.
GofResult gof_test(const Matrix& observed_xz, const Matrix& generated_xz,
                   int num_permutations, double alpha, Seed seed,
                   int threads = 1);

// Horizontal concatenation [x, z]; both have one row per observation.
Matrix join_columns(const Matrix& x, const Matrix& z);

// Summary when several generated sets are tested.
struct GofSummary {
  std::vector<GofResult> per_set;
  double min_p_value = 1.0;
  double median_p_value = 1.0;
};
GofSummary summarize_gof(std::vector<GofResult> results);

}  // namespace scoreci

#endif  // SCORECI_GOF_HPP_
