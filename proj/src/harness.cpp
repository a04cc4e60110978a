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

#include "scoreci/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace scoreci {
namespace {

void check_p_values(std::span<const double> p_values) {
  require(!p_values.empty(), "metrics: empty p-value vector");
  for (double p : p_values) {
    require(p >= 0.0 && p <= 1.0, "metrics: p-values must lie in [0, 1]");
  }
}

}  // namespace

double ks_uniform(std::span<const double> p_values) {
  check_p_values(p_values);
  std::vector<double> sorted(p_values.begin(), p_values.end());
  std::sort(sorted.begin(), sorted.end());
  const double t = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double right = static_cast<double>(i + 1) / t - sorted[i];
    const double left = sorted[i] - static_cast<double>(i) / t;
    sup = std::max({sup, right, left});
  }
  return sup;
}

double aupc(std::span<const double> p_values) {
  check_p_values(p_values);
  double sum = 0.0;
  for (double p : p_values) sum += 1.0 - p;
  return sum / static_cast<double>(p_values.size());
}

MetricsSummary summarize_p_values(std::vector<double> p_values, double alpha,
                                  bool null_holds) {
  MetricsSummary out;
  out.alpha = alpha;
  out.null_holds = null_holds;
  out.trials = static_cast<int>(p_values.size());
  if (!p_values.empty()) {
    const auto rejections = std::count_if(p_values.begin(), p_values.end(),
                                          [alpha](double p) { return p <= alpha; });
    out.rejection_rate =
        static_cast<double>(rejections) / static_cast<double>(p_values.size());
    out.ks_statistic = ks_uniform(p_values);
    out.aupc = aupc(p_values);
  }
  out.p_values = std::move(p_values);
  return out;
}

MetricsSummary run_trials(const GeneratorSpec& generator,
                          const CITestConfig& config, int trials,
                          Seed base_seed, const HarnessOptions& options) {
  require(trials >= 1, "run_trials: trials must be >= 1");
  const auto count = static_cast<std::size_t>(trials);
  std::vector<double> p(count, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(count);
  std::mutex callback_mutex;

  parallel_for(count, options.threads, [&](std::size_t t) {
    const GeneratorSpec spec = with_seed(
        generator, derive_seed(base_seed, t, static_cast<std::uint64_t>(SeedStream::kData)));
    CITestConfig trial_config = config;
    trial_config.master_seed =
        derive_seed(base_seed, t, static_cast<std::uint64_t>(SeedStream::kTest));
    // Parallelism is spent across trials.
    trial_config.threads = 1;
    try {
      p[t] = ci_test(generate(spec), trial_config).p_value;
    } catch (const std::exception& e) {
      if (options.strict) throw;
      errors[t] = e.what();
    }
    if (options.on_trial) {
      std::lock_guard<std::mutex> lock(callback_mutex);
      options.on_trial(static_cast<int>(t), p[t]);
    }
  });

  std::vector<double> completed;
  std::vector<std::string> failures;
  for (std::size_t t = 0; t < count; ++t) {
    if (std::isnan(p[t])) {
      failures.push_back("trial " + std::to_string(t) + ": " + errors[t]);
    } else {
      completed.push_back(p[t]);
    }
  }
  MetricsSummary out = summarize_p_values(std::move(completed), config.alpha,
                                          ci_holds(generator));
  out.failures = static_cast<int>(failures.size());
  out.failure_messages = std::move(failures);
  out.label = describe(generator);
  return out;
}

}  // namespace scoreci
