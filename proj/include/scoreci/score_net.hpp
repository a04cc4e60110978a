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

// Conditional score model s(x, z; theta): a three-layer perceptron
//
//   s = W3 act(W2 act(W1 [x; z] + b1) + b2) + b3
//
// with act = swish. Besides the forward pass the model provides the
// directional input derivative (ds/dx) v and the exact parameter gradient of
// the sliced score matching loss, which needs second derivatives of the
// activation because the loss contains the tangent itself.

#ifndef SCORECI_SCORE_NET_HPP_
#define SCORECI_SCORE_NET_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>

#include "scoreci/common.hpp"
#include "scoreci/rng.hpp"

namespace scoreci {

// Identity is used by tests to build linear (analytic) score models.
enum class Activation : int { kSwish = 0, kIdentity = 1 };

struct NetConfig {
  int d_x = 1;
  int d_z = 0;
  int hidden = 64;
  Activation activation = Activation::kSwish;

  int input_dim() const { return d_x + d_z; }
  std::size_t parameter_count() const;
  void validate() const;
};

struct TangentOutput {
  Vector s;
  Vector jvp;
};

// Column-batched tangent pass; column j corresponds to sample j.
struct BatchTangent {
  Matrix s;
  Matrix jvp;
};

// One minibatch for the sliced loss. Columns are samples: x is d_x x b,
// z is d_z x b, v is d_x x b. Multiple projections per sample are expressed
// by repeating the sample's columns.
struct SlicedBatch {
  Matrix x;
  Matrix z;
  Matrix v;
};

struct LossGrad {
  double loss = 0.0;
  Vector grad;
};

class ScoreNet {
 public:
  // All parameters zero.
  explicit ScoreNet(const NetConfig& config);

  const NetConfig& config() const { return config_; }
  std::size_t parameter_count() const {
    return static_cast<std::size_t>(params_.size());
  }

  // Flat parameters in layer order: W1, b1, W2, b2, W3, b3, each matrix in
  // column-major order.
  const Vector& parameters() const { return params_; }
  Vector& parameters() { return params_; }

  using MatrixView = Eigen::Map<Matrix>;
  using ConstMatrixView = Eigen::Map<const Matrix>;
  using VectorView = Eigen::Map<Vector>;
  using ConstVectorView = Eigen::Map<const Vector>;

  ConstMatrixView w1() const;
  ConstVectorView b1() const;
  ConstMatrixView w2() const;
  ConstVectorView b2() const;
  ConstMatrixView w3() const;
  ConstVectorView b3() const;
  MatrixView w1();
  VectorView b1();
  MatrixView w2();
  VectorView b2();
  MatrixView w3();
  VectorView b3();

  Vector forward(const Vector& x, const Vector& z) const;
  // x is d_x x b, z is d_z x b; returns d_x x b.
  Matrix forward(const Matrix& x, const Matrix& z) const;

  // Layer-1 contribution of the conditioner, W1_z z + b1 (hidden x b). It is
  // constant along a Langevin chain and can be reused across steps.
  Matrix conditioner_offset(const Matrix& z) const;
  Matrix forward_with_offset(const Matrix& x, const Matrix& offset) const;

  TangentOutput forward_tangent(const Vector& x, const Vector& z,
                                const Vector& v) const;
  BatchTangent forward_tangent(const Matrix& x, const Matrix& z,
                               const Matrix& v) const;

  bool all_finite() const { return params_.allFinite(); }

 private:
  std::size_t offset_b1() const;
  std::size_t offset_w2() const;
  std::size_t offset_b2() const;
  std::size_t offset_w3() const;
  std::size_t offset_b3() const;
  void check_inputs(Eigen::Index x_rows, Eigen::Index z_rows,
                    Eigen::Index x_cols, Eigen::Index z_cols) const;

  NetConfig config_;
  Vector params_;
};

// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
ScoreNet init_net(const NetConfig& config, Seed seed);

// Empirical sliced objective over the batch,
//   (1/b) sum_i [ v_i^T (ds/dx)(x_i, z_i) v_i + 0.5 (v_i^T s(x_i, z_i))^2 ],
// and its exact gradient with respect to every parameter (same layout as
// ScoreNet::parameters()). Throws NumericalError on non-finite values.
LossGrad loss_grad(const ScoreNet& net, const SlicedBatch& batch);

// Binary model file: magic "SCORENET", format version, config, parameters.
void save_net(const ScoreNet& net, std::ostream& out);
ScoreNet load_net(std::istream& in);
void save_net(const ScoreNet& net, const std::string& path);
ScoreNet load_net(const std::string& path);

}  // namespace scoreci

#endif  // SCORECI_SCORE_NET_HPP_
