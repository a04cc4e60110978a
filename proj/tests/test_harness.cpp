#include <algorithm>
#include <random>

#include "doctest.h"
#include "metric_oracle.hpp"
#include "scoreci/harness.hpp"
#include "scoreci/synthgen.hpp"

using namespace scoreci;

TEST_CASE("KS statistic on hand-checked inputs") {
  CHECK(ks_uniform(std::vector<double>{1.0}) == doctest::Approx(1.0));
  CHECK(ks_uniform(std::vector<double>{0.5}) == doctest::Approx(0.5));
  for (int t : {1, 4, 10, 100}) {
    std::vector<double> grid;
    for (int i = 1; i <= t; ++i) grid.push_back((i - 0.5) / t);
    CHECK(ks_uniform(grid) == doctest::Approx(0.5 / t).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ks_uniform(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ks_uniform(std::vector<double>{1.5}), std::invalid_argument);
}

TEST_CASE("AUPC on hand-checked inputs") {
  CHECK(aupc(std::vector<double>{0.25, 0.75}) == doctest::Approx(0.5));
  CHECK(aupc(std::vector<double>(30, 1.0)) == 0.0);
  CHECK(aupc(std::vector<double>(30, 0.01)) == doctest::Approx(0.99));
  CHECK_THROWS_AS(aupc(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("summary of degenerate p-values") {
  const MetricsSummary all_zero = summarize_p_values(std::vector<double>(20, 0.0), 0.05, false);
  CHECK(all_zero.rejection_rate == 1.0);
  CHECK(all_zero.aupc == 1.0);
  CHECK(all_zero.type_label() == "H1");
  const MetricsSummary one = summarize_p_values({0.3}, 0.05, true);
  CHECK(one.rejection_rate == 0.0);
  CHECK(one.type_label() == "H0");
  CHECK(summarize_p_values({0.05}, 0.05, true).rejection_rate == 1.0);
}

TEST_CASE("metrics agree with step-function evaluation and ignore order") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(1 + trial % 37);
    for (auto& v : p) v = std::ceil(unif(rng) * 100.0) / 100.0;
    CHECK(ks_uniform(p) == doctest::Approx(scoreci::testing::ks_brute(p)).epsilon(1e-12));
    CHECK(std::abs(aupc(p) - scoreci::testing::aupc_brute(p)) < 1e-12);
    const MetricsSummary s = summarize_p_values(p, 0.05, true);
    double below = 0.0;
    for (double v : p) below += v <= 0.05;
    CHECK(s.rejection_rate == doctest::Approx(below / static_cast<double>(p.size())));
    std::vector<double> shuffled = p;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(ks_uniform(shuffled) == ks_uniform(p));
    CHECK(aupc(shuffled) == doctest::Approx(aupc(p)).epsilon(1e-14));
    CHECK(s.ks_statistic >= 0.0);
    CHECK(s.ks_statistic <= 1.0);
  }
}

TEST_CASE("KS of uniform samples stays below the 95% Kolmogorov quantile") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int below = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    std::vector<double> p(1000);
    for (auto& v : p) v = unif(rng);
    below += ks_uniform(p) < 0.0614;
  }
  // Binomial(200, 0.95) is above 180 with probability > 0.999.
  CHECK(below >= 181);
}

namespace {

CITestConfig tiny_config() {
  CITestConfig cfg;
  cfg.train.epochs = 1;
  cfg.train.hidden = 4;
  cfg.sampler.steps = 5;
  cfg.sampler.num_sets = 9;
  cfg.gof.enabled = false;
  return cfg;
}

}  // namespace

TEST_CASE("run_trials is deterministic and labelled") {
  const GeneratorSpec gen = ChainSpec{1, 1, 100, 0};
  const MetricsSummary a = run_trials(gen, tiny_config(), 3, 17);
  const MetricsSummary b = run_trials(gen, tiny_config(), 3, 17);
  HarnessOptions threaded;
  threaded.threads = 2;
  const MetricsSummary c = run_trials(gen, tiny_config(), 3, 17, threaded);
  CHECK(a.p_values == b.p_values);
  CHECK(a.p_values == c.p_values);
  CHECK(a.trials == 3);
  CHECK(a.failures == 0);
  CHECK(a.null_holds);
  CHECK(a.label.find("chain") != std::string::npos);
  const MetricsSummary single = run_trials(gen, tiny_config(), 1, 18);
  CHECK((single.rejection_rate == 0.0 || single.rejection_rate == 1.0));
}

TEST_CASE("failing trials are counted, or abort in strict mode") {
  CITestConfig cfg = tiny_config();
  cfg.train.batch_size = 500;
  const GeneratorSpec gen = ChainSpec{1, 1, 100, 0};
  int calls = 0;
  HarnessOptions options;
  options.on_trial = [&](int, double) { ++calls; };
  const MetricsSummary s = run_trials(gen, cfg, 2, 3, options);
  CHECK(s.failures == 2);
  CHECK(s.trials == 0);
  CHECK(s.failure_messages.size() == 2);
  CHECK(calls == 2);
  options.strict = true;
  CHECK_THROWS(run_trials(gen, cfg, 2, 3, options));
}
