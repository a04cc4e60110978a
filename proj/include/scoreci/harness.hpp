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

#ifndef SCORECI_HARNESS_HPP_
#define SCORECI_HARNESS_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scoreci/crt.hpp"
#include "scoreci/synthgen.hpp"

namespace scoreci {

// Sup over t of |F_emp(t) - t|, using both one-sided limits at every jump.
double ks_uniform(std::span<const double> p_values);

// Integral over [0, 1] of the empirical CDF, (1/T) sum (1 - p_i).
double aupc(std::span<const double> p_values);

struct MetricsSummary {
  double rejection_rate = 0.0;
  // True when the generator's null holds (rate is a Type I error),
  // false when it is power.
  bool null_holds = true;
  double ks_statistic = 0.0;
  double aupc = 0.0;
  double alpha = 0.05;
  int trials = 0;
  int failures = 0;
  std::vector<double> p_values;
  std::vector<std::string> failure_messages;
  std::string label;

  std::string type_label() const { return null_holds ? "H0" : "H1"; }
};

MetricsSummary summarize_p_values(std::vector<double> p_values, double alpha,
                                  bool null_holds);

struct HarnessOptions {
  int threads = 1;
  // Abort on the first failing trial instead of recording it.
  bool strict = false;
  // Called after each trial with (trial, p-value or NaN on failure).
  std::function<void(int, double)> on_trial;
};

// Trial t draws its dataset with seed derive_seed(base_seed, t, data stream)
// and runs ci_test with master seed derive_seed(base_seed, t, test stream).
MetricsSummary run_trials(const GeneratorSpec& generator,
                          const CITestConfig& config, int trials,
                          Seed base_seed, const HarnessOptions& options = {});

}  // namespace scoreci

#endif  // SCORECI_HARNESS_HPP_
