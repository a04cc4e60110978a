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

#include "scoreci/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace scoreci {

void TrainConfig::validate() const {
  require(learning_rate > 0.0, "train config: learning_rate must be > 0");
  require(epochs >= 0, "train config: epochs must be >= 0");
  require(batch_size >= 1, "train config: batch_size must be >= 1");
  require(m >= 1, "train config: m must be >= 1");
  require(adam_beta1 > 0.0 && adam_beta1 < 1.0,
          "train config: adam_beta1 must lie in (0, 1)");
  require(adam_beta2 > 0.0 && adam_beta2 < 1.0,
          "train config: adam_beta2 must lie in (0, 1)");
  require(adam_eps > 0.0, "train config: adam_eps must be > 0");
  require(hidden >= 1, "train config: hidden must be >= 1");
}

Preprocessor::Preprocessor(Vector min, Vector max, double epsilon)
    : min_(std::move(min)), max_(std::move(max)), epsilon_(epsilon) {
  require(min_.size() == max_.size(), "preprocessor: min/max size mismatch");
  require(epsilon_ > 0.0 && epsilon_ < 0.5,
          "preprocessor: epsilon must lie in (0, 0.5)");
  for (Eigen::Index j = 0; j < min_.size(); ++j) {
    require(min_(j) < max_(j), "preprocessor: min must be below max");
  }
}

Preprocessor Preprocessor::fit(const Matrix& data, double epsilon) {
  require(data.rows() >= 2, "preprocessor: need at least two rows");
  require(data.allFinite(), "preprocessor: data must be finite");
  Vector lo = data.colwise().minCoeff().transpose();
  Vector hi = data.colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (!(lo(j) < hi(j))) {
      std::ostringstream msg;
      msg << "preprocessor: column " << j << " is constant (value " << lo(j)
          << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  return Preprocessor(std::move(lo), std::move(hi), epsilon);
}

Matrix Preprocessor::scale(const Matrix& data) const {
  require(data.cols() == dims(), "preprocessor: column count mismatch");
  Matrix out(data.rows(), data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double range = max_(j) - min_(j);
    out.col(j) = ((data.col(j).array() - min_(j)) / range)
                     .max(epsilon_)
                     .min(1.0 - epsilon_)
                     .matrix();
  }
  return out;
}

Matrix Preprocessor::transform(const Matrix& data) const {
  const Eigen::ArrayXXd u = scale(data).array();
  return (u.log() - (1.0 - u).log()).matrix();
}

Matrix Preprocessor::inverse_transform(const Matrix& transformed) const {
  require(transformed.cols() == dims(), "preprocessor: column count mismatch");
  Matrix out(transformed.rows(), transformed.cols());
  for (Eigen::Index j = 0; j < transformed.cols(); ++j) {
    const Eigen::ArrayXd u = 1.0 / (1.0 + (-transformed.col(j).array()).exp());
    out.col(j) = (min_(j) + (max_(j) - min_(j)) * u).matrix();
  }
  return out;
}

Matrix ProjectionSampler::draw(Eigen::Index count) {
  Matrix v(dim_, count);
  for (Eigen::Index j = 0; j < count; ++j)
    for (Eigen::Index i = 0; i < dim_; ++i) v(i, j) = normal_(engine_);
  return v;
}

void adam_step(Vector& params, const Vector& grads, AdamState& state,
               const TrainConfig& config) {
  require(grads.size() == params.size(), "adam: gradient size mismatch");
  if (state.first_moment.size() == 0 && state.step == 0) {
    state = AdamState::zeros(params.size());
  }
  require(state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          "adam: state size mismatch");
  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  state.first_moment = b1 * state.first_moment + (1.0 - b1) * grads;
  state.second_moment =
      b2 * state.second_moment + (1.0 - b2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  params.array() -= config.learning_rate * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + config.adam_eps);
}

TrainResult train(ScoreNet initial, const Matrix& x, const Matrix& z,
                  const TrainConfig& config) {
  config.validate();
  const NetConfig& net_cfg = initial.config();
  const Eigen::Index n = x.rows();
  require(z.rows() == n, "train: x and z row counts differ");
  require(x.cols() == net_cfg.d_x && z.cols() == net_cfg.d_z,
          "train: data dimensions do not match the network");
  require(n >= config.batch_size, "train: need at least batch_size rows");
  require(x.allFinite() && z.allFinite(), "train: data must be finite");

  TrainResult result{std::move(initial), {}};
  if (config.epochs == 0) return result;

  // Columns are samples internally.
  const Matrix xt = x.transpose();
  const Matrix zt = z.transpose();
  Engine shuffle_engine(derive_seed(config.seed, 1));
  ProjectionSampler projections(net_cfg.d_x, derive_seed(config.seed, 2));
  AdamState adam = AdamState::zeros(result.net.parameters().size());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::Index batch = config.batch_size;
  const Eigen::Index m = config.m;
  result.loss_trace.reserve(static_cast<std::size_t>(config.epochs));

  SlicedBatch sb;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_engine);
    double loss_sum = 0.0;
    long step = 0;
    for (Eigen::Index start = 0; start < n; start += batch, ++step) {
      const Eigen::Index count = std::min(batch, n - start);
      const Eigen::Index cols = count * m;
      sb.x.resize(net_cfg.d_x, cols);
      sb.z.resize(net_cfg.d_z, cols);
      for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index j = 0; j < count; ++j) {
          const Eigen::Index src = order[static_cast<std::size_t>(start + j)];
          sb.x.col(r * count + j) = xt.col(src);
          if (net_cfg.d_z > 0) sb.z.col(r * count + j) = zt.col(src);
        }
      }
      sb.v = projections.draw(cols);
      LossGrad lg;
      try {
        lg = loss_grad(result.net, sb);
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << "train: epoch " << epoch << " step " << step << ": "
            << e.what() << " (try a smaller learning rate)";
        throw NumericalError(msg.str());
      }
      loss_sum += lg.loss * static_cast<double>(count);
      adam_step(result.net.parameters(), lg.grad, adam, config);
    }
    if (!result.net.all_finite()) {
      std::ostringstream msg;
      msg << "train: parameters became non-finite in epoch " << epoch;
      throw NumericalError(msg.str());
    }
    result.loss_trace.push_back(loss_sum / static_cast<double>(n));
  }
  return result;
}

TrainResult train(const Matrix& x, const Matrix& z, const TrainConfig& config) {
  config.validate();
  NetConfig net_cfg;
  net_cfg.d_x = static_cast<int>(x.cols());
  net_cfg.d_z = static_cast<int>(z.cols());
  net_cfg.hidden = config.hidden;
  return train(init_net(net_cfg, derive_seed(config.seed, SeedStream::kInit)),
               x, z, config);
}

}  // namespace scoreci
