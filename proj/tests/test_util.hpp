#ifndef SCORECI_TESTS_TEST_UTIL_HPP_
#define SCORECI_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <random>

#include "scoreci/common.hpp"
#include "scoreci/score_net.hpp"

namespace scoreci::testing {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols,
                             std::mt19937_64& rng, double lo = 0.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = unif(rng);
  return m;
}

// Random parameters on every weight and bias, not just the default init.
inline ScoreNet random_net(const NetConfig& cfg, std::mt19937_64& rng,
                           double sd = 0.5) {
  ScoreNet net(cfg);
  net.parameters() = gaussian_matrix(
      static_cast<Eigen::Index>(net.parameter_count()), 1, rng, sd);
  return net;
}

// s(x, z) = z - x, identity activations, hidden width 1.
inline ScoreNet linear_gaussian_net() {
  ScoreNet net(NetConfig{1, 1, 1, Activation::kIdentity});
  net.w1()(0, 0) = -1.0;
  net.w1()(0, 1) = 1.0;
  net.w2()(0, 0) = 1.0;
  net.w3()(0, 0) = 1.0;
  return net;
}

// s(x) = c x for d_x = 1 and no conditioner.
inline ScoreNet scaled_identity_net(double c) {
  ScoreNet net(NetConfig{1, 0, 1, Activation::kIdentity});
  net.w1()(0, 0) = c;
  net.w2()(0, 0) = 1.0;
  net.w3()(0, 0) = 1.0;
  return net;
}

inline double sample_mean(const Matrix& m) { return m.mean(); }

inline double sample_variance(const Matrix& m) {
  const double mu = m.mean();
  return (m.array() - mu).square().sum() / static_cast<double>(m.size() - 1);
}

inline double rel_err(double a, double b, double floor = 1e-7) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace scoreci::testing

#endif  // SCORECI_TESTS_TEST_UTIL_HPP_
