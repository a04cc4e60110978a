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

#include "scoreci/score_net.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace scoreci {
namespace {

constexpr std::array<char, 8> kMagic = {'S', 'C', 'O', 'R', 'E', 'N', 'E', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

// act(a), act'(a) and (optionally) act''(a), elementwise.
struct ActivationEval {
  Matrix value;
  Matrix d1;
  Matrix d2;
};

ActivationEval activate(const Matrix& a, Activation act, bool second_order) {
  ActivationEval out;
  if (act == Activation::kIdentity) {
    out.value = a;
    out.d1 = Matrix::Ones(a.rows(), a.cols());
    if (second_order) out.d2 = Matrix::Zero(a.rows(), a.cols());
    return out;
  }
  // swish(a) = a sig(a)
  // swish'   = sig (1 + a (1 - sig))
  // swish''  = sig (1 - sig) (2 + a (1 - 2 sig))
  const Eigen::ArrayXXd arr = a.array();
  const Eigen::ArrayXXd sig = 1.0 / (1.0 + (-arr).exp());
  out.value = (arr * sig).matrix();
  out.d1 = (sig * (1.0 + arr * (1.0 - sig))).matrix();
  if (second_order) {
    out.d2 = (sig * (1.0 - sig) * (2.0 + arr * (1.0 - 2.0 * sig))).matrix();
  }
  return out;
}

void activate_in_place(Matrix& a, Activation act) {
  if (act == Activation::kIdentity) return;
  a.array() = a.array() / (1.0 + (-a.array()).exp());
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("model file: unexpected end of data");
  return value;
}

}  // namespace

std::size_t NetConfig::parameter_count() const {
  const auto in = static_cast<std::size_t>(input_dim());
  const auto h = static_cast<std::size_t>(hidden);
  const auto out = static_cast<std::size_t>(d_x);
  return (in + 1) * h + (h + 1) * h + (h + 1) * out;
}

void NetConfig::validate() const {
  require(d_x >= 1, "net config: d_x must be >= 1");
  require(d_z >= 0, "net config: d_z must be >= 0");
  require(hidden >= 1, "net config: hidden must be >= 1");
  require(activation == Activation::kSwish ||
              activation == Activation::kIdentity,
          "net config: unknown activation");
}

ScoreNet::ScoreNet(const NetConfig& config) : config_(config) {
  config_.validate();
  params_ = Vector::Zero(static_cast<Eigen::Index>(config_.parameter_count()));
}

std::size_t ScoreNet::offset_b1() const {
  return static_cast<std::size_t>(config_.hidden) * config_.input_dim();
}
std::size_t ScoreNet::offset_w2() const { return offset_b1() + config_.hidden; }
std::size_t ScoreNet::offset_b2() const {
  return offset_w2() + static_cast<std::size_t>(config_.hidden) * config_.hidden;
}
std::size_t ScoreNet::offset_w3() const { return offset_b2() + config_.hidden; }
std::size_t ScoreNet::offset_b3() const {
  return offset_w3() + static_cast<std::size_t>(config_.d_x) * config_.hidden;
}

ScoreNet::ConstMatrixView ScoreNet::w1() const {
  return {params_.data(), config_.hidden, config_.input_dim()};
}
ScoreNet::ConstVectorView ScoreNet::b1() const {
  return {params_.data() + offset_b1(), config_.hidden};
}
ScoreNet::ConstMatrixView ScoreNet::w2() const {
  return {params_.data() + offset_w2(), config_.hidden, config_.hidden};
}
ScoreNet::ConstVectorView ScoreNet::b2() const {
  return {params_.data() + offset_b2(), config_.hidden};
}
ScoreNet::ConstMatrixView ScoreNet::w3() const {
  return {params_.data() + offset_w3(), config_.d_x, config_.hidden};
}
ScoreNet::ConstVectorView ScoreNet::b3() const {
  return {params_.data() + offset_b3(), config_.d_x};
}
ScoreNet::MatrixView ScoreNet::w1() {
  return {params_.data(), config_.hidden, config_.input_dim()};
}
ScoreNet::VectorView ScoreNet::b1() {
  return {params_.data() + offset_b1(), config_.hidden};
}
ScoreNet::MatrixView ScoreNet::w2() {
  return {params_.data() + offset_w2(), config_.hidden, config_.hidden};
}
ScoreNet::VectorView ScoreNet::b2() {
  return {params_.data() + offset_b2(), config_.hidden};
}
ScoreNet::MatrixView ScoreNet::w3() {
  return {params_.data() + offset_w3(), config_.d_x, config_.hidden};
}
ScoreNet::VectorView ScoreNet::b3() {
  return {params_.data() + offset_b3(), config_.d_x};
}

void ScoreNet::check_inputs(Eigen::Index x_rows, Eigen::Index z_rows,
                            Eigen::Index x_cols, Eigen::Index z_cols) const {
  if (x_rows != config_.d_x || z_rows != config_.d_z || x_cols != z_cols) {
    std::ostringstream msg;
    msg << "score net: dimension mismatch (expected x " << config_.d_x
        << " x b and z " << config_.d_z << " x b, got x " << x_rows << " x "
        << x_cols << " and z " << z_rows << " x " << z_cols << ")";
    throw std::invalid_argument(msg.str());
  }
}

Matrix ScoreNet::conditioner_offset(const Matrix& z) const {
  require(z.rows() == config_.d_z,
          "score net: conditioner has wrong dimension");
  Matrix offset(config_.hidden, z.cols());
  if (config_.d_z > 0) {
    offset.noalias() = w1().rightCols(config_.d_z) * z;
  } else {
    offset.setZero();
  }
  offset.colwise() += b1();
  return offset;
}

Matrix ScoreNet::forward_with_offset(const Matrix& x,
                                     const Matrix& offset) const {
  require(x.rows() == config_.d_x && offset.rows() == config_.hidden &&
              x.cols() == offset.cols(),
          "score net: dimension mismatch in forward_with_offset");
  Matrix a1 = offset;
  a1.noalias() += w1().leftCols(config_.d_x) * x;
  activate_in_place(a1, config_.activation);
  Matrix a2(config_.hidden, x.cols());
  a2.noalias() = w2() * a1;
  a2.colwise() += b2();
  activate_in_place(a2, config_.activation);
  Matrix s(config_.d_x, x.cols());
  s.noalias() = w3() * a2;
  s.colwise() += b3();
  return s;
}

Matrix ScoreNet::forward(const Matrix& x, const Matrix& z) const {
  check_inputs(x.rows(), z.rows(), x.cols(), z.cols());
  return forward_with_offset(x, conditioner_offset(z));
}

Vector ScoreNet::forward(const Vector& x, const Vector& z) const {
  check_inputs(x.size(), z.size(), 1, 1);
  return forward(Matrix(x), Matrix(z)).col(0);
}

BatchTangent ScoreNet::forward_tangent(const Matrix& x, const Matrix& z,
                                       const Matrix& v) const {
  check_inputs(x.rows(), z.rows(), x.cols(), z.cols());
  require(v.rows() == x.rows() && v.cols() == x.cols(),
          "score net: tangent direction has wrong shape");
  const auto w1x = w1().leftCols(config_.d_x);
  Matrix a1 = conditioner_offset(z);
  a1.noalias() += w1x * x;
  const ActivationEval act1 = activate(a1, config_.activation, false);
  Matrix h1_dot = act1.d1.cwiseProduct(w1x * v);

  Matrix a2 = w2() * act1.value;
  a2.colwise() += b2();
  const ActivationEval act2 = activate(a2, config_.activation, false);
  Matrix h2_dot = act2.d1.cwiseProduct(w2() * h1_dot);

  BatchTangent out;
  out.s = w3() * act2.value;
  out.s.colwise() += b3();
  out.jvp = w3() * h2_dot;
  return out;
}

TangentOutput ScoreNet::forward_tangent(const Vector& x, const Vector& z,
                                        const Vector& v) const {
  check_inputs(x.size(), z.size(), 1, 1);
  BatchTangent batch = forward_tangent(Matrix(x), Matrix(z), Matrix(v));
  return {batch.s.col(0), batch.jvp.col(0)};
}

ScoreNet init_net(const NetConfig& config, Seed seed) {
  ScoreNet net(config);
  Engine engine(seed);
  auto fill = [&engine](auto&& w) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(engine);
  };
  fill(net.w1());
  fill(net.w2());
  fill(net.w3());
  return net;
}

LossGrad loss_grad(const ScoreNet& net, const SlicedBatch& batch) {
  const NetConfig& cfg = net.config();
  const Eigen::Index b = batch.x.cols();
  require(b > 0, "loss_grad: empty batch");
  require(batch.x.rows() == cfg.d_x && batch.z.rows() == cfg.d_z &&
              batch.v.rows() == cfg.d_x && batch.z.cols() == b &&
              batch.v.cols() == b,
          "loss_grad: batch dimensions do not match the network");

  const auto w1 = net.w1();
  const auto w1x = w1.leftCols(cfg.d_x);
  const auto w2 = net.w2();
  const auto w3 = net.w3();

  // Primal and tangent passes.
  Matrix input(cfg.input_dim(), b);
  input.topRows(cfg.d_x) = batch.x;
  if (cfg.d_z > 0) input.bottomRows(cfg.d_z) = batch.z;

  Matrix a1 = w1 * input;
  a1.colwise() += net.b1();
  const Matrix a1_dot = w1x * batch.v;
  const ActivationEval act1 = activate(a1, cfg.activation, true);
  const Matrix h1_dot = act1.d1.cwiseProduct(a1_dot);

  Matrix a2 = w2 * act1.value;
  a2.colwise() += net.b2();
  const Matrix a2_dot = w2 * h1_dot;
  const ActivationEval act2 = activate(a2, cfg.activation, true);
  const Matrix h2_dot = act2.d1.cwiseProduct(a2_dot);

  Matrix s = w3 * act2.value;
  s.colwise() += net.b3();
  const Matrix s_dot = w3 * h2_dot;

  const RowVector proj = batch.v.cwiseProduct(s).colwise().sum();
  const RowVector quad = batch.v.cwiseProduct(s_dot).colwise().sum();
  const double inv_b = 1.0 / static_cast<double>(b);

  LossGrad out;
  out.loss = (quad.array() + 0.5 * proj.array().square()).sum() * inv_b;
  if (!std::isfinite(out.loss)) {
    std::ostringstream msg;
    msg << "loss_grad: non-finite loss " << out.loss;
    throw NumericalError(msg.str());
  }

  // Reverse pass over both the primal and the tangent graph.
  const Matrix g_s = batch.v * (proj.transpose() * inv_b).asDiagonal();
  const Matrix g_s_dot = batch.v * inv_b;

  out.grad = Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  const std::size_t n1 = static_cast<std::size_t>(cfg.hidden) * cfg.input_dim();
  const std::size_t n2 = static_cast<std::size_t>(cfg.hidden) * cfg.hidden;
  const std::size_t n3 = static_cast<std::size_t>(cfg.d_x) * cfg.hidden;
  double* p = out.grad.data();
  Eigen::Map<Matrix> gw1(p, cfg.hidden, cfg.input_dim());
  p += n1;
  Eigen::Map<Vector> gb1(p, cfg.hidden);
  p += cfg.hidden;
  Eigen::Map<Matrix> gw2(p, cfg.hidden, cfg.hidden);
  p += n2;
  Eigen::Map<Vector> gb2(p, cfg.hidden);
  p += cfg.hidden;
  Eigen::Map<Matrix> gw3(p, cfg.d_x, cfg.hidden);
  p += n3;
  Eigen::Map<Vector> gb3(p, cfg.d_x);

  gw3.noalias() = g_s * act2.value.transpose();
  gw3.noalias() += g_s_dot * h2_dot.transpose();
  gb3 = g_s.rowwise().sum();

  const Matrix g_h2 = w3.transpose() * g_s;
  const Matrix g_h2_dot = w3.transpose() * g_s_dot;
  const Matrix g_a2_dot = act2.d1.cwiseProduct(g_h2_dot);
  const Matrix g_a2 = act2.d1.cwiseProduct(g_h2) +
                      act2.d2.cwiseProduct(a2_dot).cwiseProduct(g_h2_dot);

  gw2.noalias() = g_a2 * act1.value.transpose();
  gw2.noalias() += g_a2_dot * h1_dot.transpose();
  gb2 = g_a2.rowwise().sum();

  const Matrix g_h1 = w2.transpose() * g_a2;
  const Matrix g_h1_dot = w2.transpose() * g_a2_dot;
  const Matrix g_a1_dot = act1.d1.cwiseProduct(g_h1_dot);
  const Matrix g_a1 = act1.d1.cwiseProduct(g_h1) +
                      act1.d2.cwiseProduct(a1_dot).cwiseProduct(g_h1_dot);

  gw1.noalias() = g_a1 * input.transpose();
  gw1.leftCols(cfg.d_x).noalias() += g_a1_dot * batch.v.transpose();
  gb1 = g_a1.rowwise().sum();

  if (!out.grad.allFinite()) {
    throw NumericalError("loss_grad: non-finite gradient");
  }
  return out;
}

void save_net(const ScoreNet& net, std::ostream& out) {
  const NetConfig& cfg = net.config();
  out.write(kMagic.data(), kMagic.size());
  write_pod(out, kFormatVersion);
  write_pod(out, static_cast<std::int32_t>(cfg.d_x));
  write_pod(out, static_cast<std::int32_t>(cfg.d_z));
  write_pod(out, static_cast<std::int32_t>(cfg.hidden));
  write_pod(out, static_cast<std::int32_t>(cfg.activation));
  write_pod(out, static_cast<std::uint64_t>(net.parameter_count()));
  out.write(reinterpret_cast<const char*>(net.parameters().data()),
            static_cast<std::streamsize>(net.parameter_count() * sizeof(double)));
  if (!out) throw std::runtime_error("model file: write failed");
}

ScoreNet load_net(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw std::runtime_error("model file: bad magic header");
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw std::runtime_error("model file: unsupported format version " +
                             std::to_string(version));
  }
  NetConfig cfg;
  cfg.d_x = read_pod<std::int32_t>(in);
  cfg.d_z = read_pod<std::int32_t>(in);
  cfg.hidden = read_pod<std::int32_t>(in);
  cfg.activation = static_cast<Activation>(read_pod<std::int32_t>(in));
  cfg.validate();
  const auto count = read_pod<std::uint64_t>(in);
  if (count != cfg.parameter_count()) {
    throw std::runtime_error("model file: parameter count does not match config");
  }
  ScoreNet net(cfg);
  in.read(reinterpret_cast<char*>(net.parameters().data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("model file: truncated parameters");
  return net;
}

void save_net(const ScoreNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_net(net, out);
}

ScoreNet load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_net(in);
}

}  // namespace scoreci
