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

#include "scoreci/crt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scoreci/detail/stats_internal.hpp"

namespace scoreci {
namespace {

class RdcStatistic final : public CiStatistic {
 public:
  RdcStatistic(const RdcSpec& spec, const Matrix& y)
      : spec_(spec),
        y_basis_(detail::whitened_basis(rdc_features(y, spec), spec.ridge)),
        rows_(y.rows()) {
    if (rows_ < spec_.k + 2) {
      throw std::invalid_argument("rdc statistic: need at least k + 2 rows");
    }
  }

  double evaluate(const Matrix& x) const override {
    require(x.rows() == rows_, "rdc statistic: row count mismatch");
    return detail::max_canonical_correlation(
        detail::whitened_basis(rdc_features(x, spec_), spec_.ridge), y_basis_);
  }

  std::string name() const override { return "rdc"; }

 private:
  RdcSpec spec_;
  Matrix y_basis_;
  Eigen::Index rows_;
};

Matrix standardize_columns(const Matrix& m) {
  Matrix out = m.rowwise() - m.colwise().mean();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double sd = std::sqrt(out.col(j).squaredNorm() /
                                static_cast<double>(std::max<Eigen::Index>(out.rows() - 1, 1)));
    if (sd > 0.0) out.col(j) /= sd;
  }
  return out;
}

// Biased MMD^2 between the joint rows (x_i, y_i) and the decoupled rows
// (x_i, y_pi(i)) for a permutation pi fixed by the seed. Each block is
// standardized by its own column moments and the bandwidth is
// sqrt(d_x + d_y), so rho is a fixed function of the triple.
class MmdStatistic final : public CiStatistic {
 public:
  MmdStatistic(Seed seed, const Matrix& y) : rows_(y.rows()), y_cols_(y.cols()) {
    require(rows_ >= 2, "mmd statistic: need at least two rows");
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(rows_));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Engine engine(derive_seed(seed, SeedStream::kStatistic));
    std::shuffle(perm.begin(), perm.end(), engine);
    const Matrix dy = detail::squared_distances(standardize_columns(y));
    dy_joint_ = dy;
    dy_cross_.resize(rows_, rows_);
    dy_perm_.resize(rows_, rows_);
    for (Eigen::Index j = 0; j < rows_; ++j) {
      for (Eigen::Index i = 0; i < rows_; ++i) {
        dy_cross_(i, j) = dy(i, perm[j]);
        dy_perm_(i, j) = dy(perm[i], perm[j]);
      }
    }
  }

  double evaluate(const Matrix& x) const override {
    require(x.rows() == rows_, "mmd statistic: row count mismatch");
    const Matrix dx = detail::squared_distances(standardize_columns(x));
    const double bw2 = static_cast<double>(x.cols() + y_cols_);
    const double scale = -1.0 / (2.0 * bw2);
    const double aa = ((dx + dy_joint_).array() * scale).exp().sum();
    const double bb = ((dx + dy_perm_).array() * scale).exp().sum();
    const double ab = ((dx + dy_cross_).array() * scale).exp().sum();
    const double n2 = static_cast<double>(rows_) * static_cast<double>(rows_);
    return std::max(0.0, (aa + bb - 2.0 * ab) / n2);
  }

  std::string name() const override { return "mmd"; }

 private:
  Eigen::Index rows_;
  Eigen::Index y_cols_;
  Matrix dy_joint_;
  Matrix dy_cross_;
  Matrix dy_perm_;
};

}  // namespace

std::string to_string(StatisticKind kind) {
  return kind == StatisticKind::kRdc ? "rdc" : "mmd";
}

StatisticKind parse_statistic_kind(const std::string& name) {
  if (name == "rdc") return StatisticKind::kRdc;
  if (name == "mmd") return StatisticKind::kMmd;
  throw std::invalid_argument("unknown statistic '" + name +
                              "' (expected rdc or mmd)");
}

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::kInput: return "input";
    case Stage::kTraining: return "training";
    case Stage::kSampling: return "sampling";
    case Stage::kGof: return "gof";
    case Stage::kStatistic: return "statistic";
  }
  return "unknown";
}

std::unique_ptr<CiStatistic> make_statistic(const StatisticSpec& spec,
                                            Seed seed, const Matrix& y,
                                            const Matrix& z) {
  require(y.rows() == z.rows(), "statistic: y and z row counts differ");
  switch (spec.kind) {
    case StatisticKind::kRdc: {
      RdcSpec rdc_spec = spec.rdc;
      rdc_spec.seed = seed;
      return std::make_unique<RdcStatistic>(rdc_spec, y);
    }
    case StatisticKind::kMmd:
      return std::make_unique<MmdStatistic>(seed, y);
  }
  throw std::invalid_argument("statistic: unknown kind");
}

void CITestConfig::validate() const {
  require(alpha > 0.0 && alpha < 1.0, "ci test: alpha must lie in (0, 1)");
  require(train_fraction > 0.0 && train_fraction <= 1.0,
          "ci test: train_fraction must lie in (0, 1]");
  train.validate();
  sampler.validate();
  if (gof.enabled) gof.validate();
  if (statistic.kind == StatisticKind::kRdc) statistic.rdc.validate();
}

StageSeeds StageSeeds::from_master(Seed master) {
  return {master, derive_seed(master, SeedStream::kTrain),
          derive_seed(master, SeedStream::kSampler),
          derive_seed(master, SeedStream::kGof),
          derive_seed(master, SeedStream::kStatistic)};
}

double pvalue(double observed, std::span<const double> nulls) {
  require(!nulls.empty(), "pvalue: empty null statistics");
  require(std::isfinite(observed), "pvalue: observed statistic is not finite");
  std::size_t count = 0;
  for (double v : nulls) {
    require(std::isfinite(v), "pvalue: null statistic is not finite");
    if (v >= observed) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(1 + nulls.size());
}

CITestReport crt_from_ensemble(const Matrix& x, const Matrix& y,
                               const Matrix& z, const NullEnsemble& ensemble,
                               const StatisticSpec& spec, Seed statistic_seed,
                               double alpha, int threads) {
  require(!ensemble.sets.empty(), "crt: empty ensemble");
  std::unique_ptr<CiStatistic> statistic;
  CITestReport report;
  report.alpha = alpha;
  try {
    statistic = make_statistic(spec, statistic_seed, y, z);
    report.statistic_observed = statistic->evaluate(x);
    report.statistics_null.assign(ensemble.sets.size(), 0.0);
    parallel_for(ensemble.sets.size(), threads, [&](std::size_t b) {
      report.statistics_null[b] = statistic->evaluate(ensemble.sets[b]);
    });
    report.p_value = pvalue(report.statistic_observed, report.statistics_null);
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(Stage::kStatistic, e.what());
  }
  report.reject = report.p_value <= alpha;
  return report;
}

CITestReport ci_test_with_net(const Matrix& x, const Matrix& y,
                              const Matrix& z, const ScoreNet& net,
                              const CITestConfig& config) {
  try {
    config.validate();
    require(x.rows() == y.rows() && x.rows() == z.rows(),
            "x, y and z must have the same number of rows");
    require(x.cols() == net.config().d_x && z.cols() == net.config().d_z,
            "data dimensions do not match the score model");
  } catch (const std::invalid_argument& e) {
    throw PipelineError(Stage::kInput, e.what());
  }
  const StageSeeds seeds = StageSeeds::from_master(config.master_seed);

  SamplerConfig sampler = config.sampler;
  sampler.seed = seeds.sampler;
  sampler.threads = config.threads;
  NullEnsemble ensemble;
  try {
    ensemble = sample_conditional(net, z, sampler);
  } catch (const std::exception& e) {
    throw PipelineError(Stage::kSampling, e.what());
  }

  std::optional<GofResult> gof;
  std::optional<GofSummary> gof_all;
  std::vector<std::string> warnings;
  if (config.gof.enabled) {
    try {
      const Matrix observed_xz = join_columns(x, z);
      const std::size_t sets = config.gof.all_sets ? ensemble.sets.size() : 1;
      std::vector<GofResult> results;
      for (std::size_t b = 0; b < sets; ++b) {
        results.push_back(gof_test(observed_xz, join_columns(ensemble.sets[b], z),
                                   config.gof.num_permutations, config.gof.alpha,
                                   derive_seed(seeds.gof, b), config.threads));
      }
      gof = results.front();
      if (config.gof.all_sets) gof_all = summarize_gof(std::move(results));
    } catch (const std::exception& e) {
      throw PipelineError(Stage::kGof, e.what());
    }
    if (!gof->pass) {
      std::ostringstream msg;
      msg << "goodness-of-fit check failed (p = " << gof->p_value
          << " <= " << gof->alpha << "); generated samples may not match "
          << "the observed conditional distribution";
      if (config.gof.strict) throw PipelineError(Stage::kGof, msg.str());
      warnings.push_back(msg.str());
    }
  }

  CITestReport report =
      crt_from_ensemble(x, y, z, ensemble, config.statistic, seeds.statistic,
                        config.alpha, config.threads);
  report.gof = std::move(gof);
  report.gof_all = std::move(gof_all);
  report.seeds = seeds;
  report.warnings = std::move(warnings);
  report.n_test = x.rows();
  if (config.keep_ensemble) report.ensemble = std::move(ensemble);
  return report;
}

CITestReport ci_test(const Dataset& data, const CITestConfig& config) {
  Eigen::Index n_train = 0;
  try {
    config.validate();
    data.validate();
    require(data.x.cols() >= 1 && data.y.cols() >= 1,
            "data needs at least one x and one y column");
    require(data.z.cols() >= 1, "data needs at least one z column");
    n_train = static_cast<Eigen::Index>(
        std::floor(config.train_fraction * static_cast<double>(data.rows())));
    if (config.train_fraction >= 1.0) n_train = data.rows();
    const Eigen::Index n_test =
        config.train_fraction >= 1.0 ? data.rows() : data.rows() - n_train;
    require(n_train >= config.train.batch_size,
            "need at least batch_size training rows");
    require(n_test >= 2, "need at least two test rows");
    if (config.statistic.kind == StatisticKind::kRdc) {
      require(n_test >= config.statistic.rdc.k + 2,
              "need at least k + 2 test rows for the rdc statistic");
    }
  } catch (const std::invalid_argument& e) {
    throw PipelineError(Stage::kInput, e.what());
  }
  const StageSeeds seeds = StageSeeds::from_master(config.master_seed);
  const bool split = config.train_fraction < 1.0;
  const Eigen::Index n = data.rows();
  const Eigen::Index test_start = split ? n_train : 0;

  Preprocessor pre;
  Matrix x_all;
  try {
    pre = Preprocessor::fit(data.x.topRows(n_train));
    x_all = pre.transform(data.x);
  } catch (const std::invalid_argument& e) {
    throw PipelineError(Stage::kInput, e.what());
  }

  TrainConfig train_cfg = config.train;
  train_cfg.seed = seeds.train;
  TrainResult trained = [&] {
    try {
      return train(x_all.topRows(n_train), data.z.topRows(n_train), train_cfg);
    } catch (const std::exception& e) {
      throw PipelineError(Stage::kTraining, e.what());
    }
  }();

  const Eigen::Index n_test = n - test_start;
  CITestReport report = ci_test_with_net(
      x_all.middleRows(test_start, n_test), data.y.middleRows(test_start, n_test),
      data.z.middleRows(test_start, n_test), trained.net, config);
  report.loss_trace = std::move(trained.loss_trace);
  report.n_train = n_train;
  if (config.keep_ensemble) report.preprocessor = pre;
  return report;
}

}  // namespace scoreci
