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

#ifndef SCORECI_TRAINER_HPP_
#define SCORECI_TRAINER_HPP_

#include <vector>

#include "scoreci/common.hpp"
#include "scoreci/rng.hpp"
#include "scoreci/score_net.hpp"

namespace scoreci {

struct TrainConfig {
  double learning_rate = 1e-4;
  int epochs = 100;
  int batch_size = 50;
  // Projections per sample.
  int m = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int hidden = 64;
  Seed seed = 0;

  void validate() const;
};

// Min-max scaling to [0, 1] followed by the logit map. Scaled values are
// clamped to [eps, 1 - eps] so the logit stays finite at the data extremes.
class Preprocessor {
 public:
  static constexpr double kDefaultEpsilon = 1e-5;

  Preprocessor() = default;
  Preprocessor(Vector min, Vector max, double epsilon = kDefaultEpsilon);

  // Requires at least two rows; a constant column is an error that names it.
  static Preprocessor fit(const Matrix& data,
                          double epsilon = kDefaultEpsilon);

  Matrix scale(const Matrix& data) const;
  Matrix transform(const Matrix& data) const;
  Matrix inverse_transform(const Matrix& transformed) const;

  const Vector& min() const { return min_; }
  const Vector& max() const { return max_; }
  double epsilon() const { return epsilon_; }
  Eigen::Index dims() const { return min_.size(); }

 private:
  Vector min_;
  Vector max_;
  double epsilon_ = kDefaultEpsilon;
};

// Projection directions v ~ N(0, I_d).
class ProjectionSampler {
 public:
  ProjectionSampler(int dim, Seed seed) : dim_(dim), engine_(seed) {}
  // dim x count matrix of independent draws.
  Matrix draw(Eigen::Index count);
  int dim() const { return dim_; }

 private:
  int dim_;
  Engine engine_;
  std::normal_distribution<double> normal_;
};

struct AdamState {
  Vector first_moment;
  Vector second_moment;
  long step = 0;

  static AdamState zeros(Eigen::Index size) {
    return {Vector::Zero(size), Vector::Zero(size), 0};
  }
};

// One bias-corrected Adam update of `params` in place.
void adam_step(Vector& params, const Vector& grads, AdamState& state,
               const TrainConfig& config);

struct TrainResult {
  ScoreNet net;
  // Mean loss of each epoch, weighted by batch size.
  std::vector<double> loss_trace;
};

// Minimizes the sliced objective on rows of (x, z) starting from `initial`.
// Each epoch reshuffles the rows from the seeded stream; every batch draws
// m fresh projections per sample. Throws NumericalError on a non-finite
// loss, naming the epoch and step.
TrainResult train(ScoreNet initial, const Matrix& x, const Matrix& z,
                  const TrainConfig& config);

// Same, starting from init_net with a seed derived from config.seed.
TrainResult train(const Matrix& x, const Matrix& z, const TrainConfig& config);

}  // namespace scoreci

#endif  // SCORECI_TRAINER_HPP_
