#ifndef SCORECI_TESTS_METRIC_ORACLE_HPP_
#define SCORECI_TESTS_METRIC_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

namespace scoreci::testing {

// Sup of |F(t) - t| checked at t = 0, 1 and at both one-sided limits of every
// jump, with F counted directly.
inline double ks_brute(const std::vector<double>& p) {
  const double t = static_cast<double>(p.size());
  auto count = [&](double at, bool inclusive) {
    double c = 0.0;
    for (double v : p) c += inclusive ? (v <= at) : (v < at);
    return c / t;
  };
  double sup = std::max(std::abs(count(0.0, true)), std::abs(count(1.0, true) - 1.0));
  for (double v : p) {
    sup = std::max(sup, std::abs(count(v, true) - v));
    sup = std::max(sup, std::abs(count(v, false) - v));
  }
  return sup;
}

// Integral of the empirical CDF over [0, 1], piece by piece between jumps.
inline double aupc_brute(const std::vector<double>& p) {
  std::vector<double> knots = p;
  knots.push_back(0.0);
  knots.push_back(1.0);
  std::sort(knots.begin(), knots.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i], hi = knots[i + 1];
    if (hi <= lo) continue;
    double below = 0.0;
    for (double v : p) below += v <= lo;
    area += below / static_cast<double>(p.size()) * (hi - lo);
  }
  return area;
}

}  // namespace scoreci::testing

#endif  // SCORECI_TESTS_METRIC_ORACLE_HPP_
