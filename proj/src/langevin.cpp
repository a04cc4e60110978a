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

#include "scoreci/langevin.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace scoreci {
namespace {

// Noise source of one (set, row) cell.
struct CellStream {
  Engine engine;
  std::normal_distribution<double> normal;

  explicit CellStream(Seed seed) : engine(seed) {}
  double operator()() { return normal(engine); }
};

[[noreturn]] void report_blowup(std::size_t set, Eigen::Index row, int step,
                                double step_size) {
  std::ostringstream msg;
  msg << "langevin: non-finite iterate at set " << set << ", row " << row
      << ", step " << step << " (step size " << step_size
      << "; try a smaller step size)";
  throw NumericalError(msg.str());
}

// Copy of the network in the working precision, with the conditioner part
// of layer 1 folded into a per-row offset.
template <typename T>
class ChainScore {
 public:
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  ChainScore(const ScoreNet& net, const Matrix& z_cols)
      : swish_(net.config().activation == Activation::kSwish),
        w1x_(net.w1().leftCols(net.config().d_x).template cast<T>()),
        w2_(net.w2().template cast<T>()),
        w3_(net.w3().template cast<T>()),
        b2_(net.b2().template cast<T>()),
        b3_(net.b3().template cast<T>()),
        offset_(net.conditioner_offset(z_cols).template cast<T>()) {}

  // x is d_x x n in double; writes h * s(x) into step.
  void scaled_score(const Matrix& x, double h, Matrix& step) {
    xt_ = x.template cast<T>();
    a1_ = offset_;
    a1_.noalias() += w1x_ * xt_;
    activate(a1_);
    a2_.noalias() = w2_ * a1_;
    a2_.colwise() += b2_;
    activate(a2_);
    s_.noalias() = w3_ * a2_;
    s_.colwise() += b3_;
    step = h * s_.template cast<double>();
  }

 private:
  void activate(Mat& a) const {
    if (swish_) a.array() = a.array() / (T(1) + (-a.array()).exp());
  }

  bool swish_;
  Mat w1x_, w2_, w3_;
  Vec b2_, b3_;
  Mat offset_;
  Mat xt_, a1_, a2_, s_;
};

// Runs the chains of cells (set, rows[0..n)) under the conditioner columns
// z_cols. `trace`, if given, receives every iterate of a single-cell run.
template <typename T>
Matrix run_chains(const ScoreNet& net, const Matrix& z_cols,
                  const SamplerConfig& config, std::size_t set,
                  const std::vector<std::size_t>& rows, Matrix* trace) {
  const int dx = net.config().d_x;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const double h = config.step_size;
  const double noise_scale = std::sqrt(2.0 * h);

  std::vector<CellStream> streams;
  streams.reserve(rows.size());
  for (std::size_t r : rows) streams.emplace_back(derive_seed(config.seed, set, r));

  // Iterates as columns.
  Matrix x(dx, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < dx; ++d) x(d, i) = streams[i]();
  if (trace) trace->row(0) = x.col(0).transpose();

  ChainScore<T> score(net, z_cols);
  Matrix step;
  for (int k = 0; k < config.steps; ++k) {
    score.scaled_score(x, h, step);
    x += step;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index d = 0; d < dx; ++d) x(d, i) += noise_scale * streams[i]();
    if (!x.allFinite()) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!x.col(i).allFinite()) {
          report_blowup(set, static_cast<Eigen::Index>(rows[i]), k + 1, h);
        }
      }
    }
    if (trace) trace->row(k + 1) = x.col(0).transpose();
  }
  return x.transpose();
}

Matrix run(const ScoreNet& net, const Matrix& z_cols, const SamplerConfig& config,
           std::size_t set, const std::vector<std::size_t>& rows, Matrix* trace) {
  return config.double_precision
             ? run_chains<double>(net, z_cols, config, set, rows, trace)
             : run_chains<float>(net, z_cols, config, set, rows, trace);
}

}  // namespace

void SamplerConfig::validate() const {
  require(step_size > 0.0, "sampler config: step_size must be > 0");
  require(steps >= 1, "sampler config: steps must be >= 1");
  require(num_sets >= 1, "sampler config: num_sets must be >= 1");
}

Matrix sample_set(const ScoreNet& net, const Matrix& z,
                  const SamplerConfig& config, std::size_t set) {
  config.validate();
  require(z.cols() == net.config().d_z, "langevin: conditioner dimension mismatch");
  std::vector<std::size_t> rows(static_cast<std::size_t>(z.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return run(net, z.transpose(), config, set, rows, nullptr);
}

NullEnsemble sample_conditional(const ScoreNet& net, const Matrix& z,
                                const SamplerConfig& config) {
  config.validate();
  NullEnsemble out;
  out.z_ref = z;
  out.sets.resize(static_cast<std::size_t>(config.num_sets));
  parallel_for(out.sets.size(), config.threads, [&](std::size_t b) {
    out.sets[b] = sample_set(net, z, config, b);
  });
  return out;
}

Matrix sample_with_trace(const ScoreNet& net, const Vector& z_row,
                         const SamplerConfig& config, std::size_t set,
                         std::size_t row) {
  config.validate();
  require(z_row.size() == net.config().d_z, "langevin: conditioner dimension mismatch");
  Matrix trace(config.steps + 1, net.config().d_x);
  run(net, Matrix(z_row), config, set, {row}, &trace);
  return trace;
}

}  // namespace scoreci
