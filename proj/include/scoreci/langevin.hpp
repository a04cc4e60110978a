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

// Conditional Langevin sampling under a trained score model:
//
//   x_0 ~ N(0, I),  x_{k+1} = x_k + h s(x_k, z_i) + sqrt(2h) xi_k.
//
// Cell (b, i) (set b, row i) draws all of its noise from its own engine
// seeded by derive_seed(seed, b, i), so the output does not depend on how
// the work is scheduled across threads. Y never enters the computation.

#ifndef SCORECI_LANGEVIN_HPP_
#define SCORECI_LANGEVIN_HPP_

#include <cstddef>
#include <vector>

#include "scoreci/common.hpp"
#include "scoreci/rng.hpp"
#include "scoreci/score_net.hpp"

namespace scoreci {

struct SamplerConfig {
  double step_size = 0.1;
  int steps = 200;
  // Number of pseudo-sample sets B.
  int num_sets = 100;
  Seed seed = 0;
  int threads = 1;
  // The score network is evaluated in single precision unless set; iterates
  // are always accumulated in double.
  bool double_precision = false;

  void validate() const;
};

struct NullEnsemble {
  // num_sets matrices of shape n x d_x; row i was generated under z_ref.row(i).
  std::vector<Matrix> sets;
  Matrix z_ref;
};

// z is n x d_z. Throws NumericalError naming (set, row, step) if an
// iterate leaves the finite range.
NullEnsemble sample_conditional(const ScoreNet& net, const Matrix& z,
                                const SamplerConfig& config);

// Runs only set `set`; identical to sample_conditional(...).sets[set].
Matrix sample_set(const ScoreNet& net, const Matrix& z,
                  const SamplerConfig& config, std::size_t set);

// Every iterate of cell (set, row) under conditioner z_row; (steps + 1) x d_x.
// The last row equals row `row` of set `set` from sample_conditional when
// z_row is that row's conditioner (exactly with double_precision, otherwise
// up to single-precision rounding).
Matrix sample_with_trace(const ScoreNet& net, const Vector& z_row,
                         const SamplerConfig& config, std::size_t set = 0,
                         std::size_t row = 0);

}  // namespace scoreci

#endif  // SCORECI_LANGEVIN_HPP_
