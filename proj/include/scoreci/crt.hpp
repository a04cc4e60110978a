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

// Conditional randomization test driven by a score-based generator:
//
//   1. fit the preprocessor on X and train the score model on (X', Z),
//   2. draw B pseudo-sample sets X~(b) given the observed Z,
//   3. check the first set against the observed (X', Z) (goodness of fit),
//   4. fix the statistic from (Y, Z) and its seed,
//   5. compare rho(X', Y, Z) with rho(X~(b), Y, Z) for every b.

#ifndef SCORECI_CRT_HPP_
#define SCORECI_CRT_HPP_

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scoreci/common.hpp"
#include "scoreci/gof.hpp"
#include "scoreci/langevin.hpp"
#include "scoreci/rng.hpp"
#include "scoreci/score_net.hpp"
#include "scoreci/stats.hpp"
#include "scoreci/trainer.hpp"

namespace scoreci {

enum class StatisticKind { kRdc, kMmd };

std::string to_string(StatisticKind kind);
StatisticKind parse_statistic_kind(const std::string& name);

struct StatisticSpec {
  StatisticKind kind = StatisticKind::kRdc;
  // Used by kRdc; its seed is overwritten by the stage seed in ci_test.
  RdcSpec rdc;
};

// A CI statistic rho(X, Y, Z) with (Y, Z) and all internal randomness fixed
// at construction. Observed X is never available while the statistic is
// configured, so rho is the same function for the observed and every
// generated X.
class CiStatistic {
 public:
  virtual ~CiStatistic() = default;
  virtual double evaluate(const Matrix& x) const = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<CiStatistic> make_statistic(const StatisticSpec& spec,
                                            Seed seed, const Matrix& y,
                                            const Matrix& z);

struct CITestConfig {
  double alpha = 0.05;
  TrainConfig train;
  SamplerConfig sampler;
  StatisticSpec statistic;
  GofConfig gof;
  Seed master_seed = 0;
  // Fraction of rows used to train the score model. Below 1 the first rows
  // train the model and the remaining rows are tested.
  double train_fraction = 1.0;
  int threads = 1;
  // Keep the generated ensemble (and the fitted preprocessor) in the report.
  bool keep_ensemble = false;

  void validate() const;
};

struct StageSeeds {
  Seed master = 0;
  Seed train = 0;
  Seed sampler = 0;
  Seed gof = 0;
  Seed statistic = 0;

  static StageSeeds from_master(Seed master);
};

enum class Stage { kInput, kTraining, kSampling, kGof, kStatistic };
std::string to_string(Stage stage);

// Failure of one pipeline stage.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(Stage stage, const std::string& what)
      : std::runtime_error(to_string(stage) + ": " + what), stage_(stage) {}
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct CITestReport {
  double statistic_observed = 0.0;
  std::vector<double> statistics_null;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  std::optional<GofResult> gof;
  // Filled when every generated set was checked.
  std::optional<GofSummary> gof_all;
  StageSeeds seeds;
  std::vector<double> loss_trace;
  std::vector<std::string> warnings;
  Eigen::Index n_train = 0;
  Eigen::Index n_test = 0;
  // Only with CITestConfig::keep_ensemble.
  std::optional<NullEnsemble> ensemble;
  std::optional<Preprocessor> preprocessor;
};

// (1 + #{b : nulls[b] >= observed}) / (1 + B).
double pvalue(double observed, std::span<const double> nulls);

// Full pipeline on raw data.
CITestReport ci_test(const Dataset& data, const CITestConfig& config);

// Stages 2-5 with a given score model. `x` must live in the space the model
// was trained in (preprocessed space for ci_test). No training happens.
CITestReport ci_test_with_net(const Matrix& x, const Matrix& y,
                              const Matrix& z, const ScoreNet& net,
                              const CITestConfig& config);

// Stages 4-5 only: statistic built from (Y, Z) and `statistic_seed`, then
// evaluated on the observed X and every ensemble member.
CITestReport crt_from_ensemble(const Matrix& x, const Matrix& y,
                               const Matrix& z, const NullEnsemble& ensemble,
                               const StatisticSpec& spec, Seed statistic_seed,
                               double alpha, int threads = 1);

}  // namespace scoreci

#endif  // SCORECI_CRT_HPP_
