#include "doctest.h"
#include "scoreci/synthgen.hpp"
#include "test_util.hpp"

using namespace scoreci;
using scoreci::testing::sample_mean;
using scoreci::testing::sample_variance;

namespace {

double correlation(const Vector& a, const Vector& b) {
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace

TEST_CASE("ground truth labels") {
  for (int c = 1; c <= 4; ++c) {
    BenchmarkSpec spec;
    spec.case_id = c;
    spec.n = 20;
    CHECK(gen_benchmark(spec).ci_holds == (c == 1 || c == 3));
    CHECK(ci_holds(GeneratorSpec{spec}) == (c == 1 || c == 3));
  }
  CHECK(ci_holds(GeneratorSpec{HighDimSpec{0.0, 10, 5, 1}}));
  CHECK_FALSE(ci_holds(GeneratorSpec{HighDimSpec{0.3, 10, 5, 1}}));
  CHECK(ci_holds(GeneratorSpec{ChainSpec{}}));
  BenchmarkSpec bad;
  bad.case_id = 5;
  CHECK_THROWS_AS(gen_benchmark(bad), std::invalid_argument);
}

TEST_CASE("case 1 with linear links is pure noise in X") {
  BenchmarkSpec spec;
  spec.case_id = 1;
  spec.n = 10000;
  spec.d_z = 3;
  spec.seed = 2;
  const Dataset d = gen_benchmark(spec);
  CHECK(std::abs(sample_mean(d.x)) < 0.05);
  CHECK(std::abs(sample_variance(d.x) - 1.0) < 0.05);
  CHECK(std::abs(correlation(d.x.col(0), d.y.col(0))) < 0.05);
  CHECK(std::abs(correlation(d.x.col(0), d.z.rowwise().mean())) < 0.05);
}

TEST_CASE("case 3 correlation with the conditioner mean") {
  BenchmarkSpec spec;
  spec.case_id = 3;
  spec.n = 10000;
  spec.d_z = 10;
  spec.seed = 3;
  const Dataset d = gen_benchmark(spec);
  const double expected = std::sqrt(0.1 / 1.1);
  CHECK(expected == doctest::Approx(0.3015).epsilon(1e-3));
  CHECK(std::abs(correlation(d.x.col(0), d.z.rowwise().mean()) - expected) < 0.03);
}

TEST_CASE("case 4 shares a noise term between X and Y") {
  BenchmarkSpec spec;
  spec.case_id = 4;
  spec.n = 10000;
  spec.d_z = 5;
  spec.seed = 4;
  const Dataset d = gen_benchmark(spec);
  // Var(zbar) = 0.2; Cov = 0.2 + 0.64; Var = 0.2 + 0.64 + 1.
  CHECK(std::abs(correlation(d.x.col(0), d.y.col(0)) - 0.84 / 1.84) < 0.03);
}

TEST_CASE("same spec gives identical data; a new seed does not") {
  const GeneratorSpec specs[] = {BenchmarkSpec{4, LinkFunction::kTanh, LinkFunction::kCos, 50, 3, 9},
                                 HighDimSpec{0.3, 50, 8, 9}, ChainSpec{2, 1, 50, 9}};
  for (const auto& spec : specs) {
    const Dataset a = generate(spec);
    const Dataset b = generate(spec);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.z == b.z);
    const Dataset c = generate(with_seed(spec, 10));
    CHECK(a.x != c.x);
    CHECK_FALSE(describe(spec).empty());
  }
}

TEST_CASE("link functions") {
  CHECK(apply(LinkFunction::kLinear, -1.5) == -1.5);
  CHECK(apply(LinkFunction::kSquare, -1.5) == 2.25);
  CHECK(apply(LinkFunction::kCos, 0.0) == 1.0);
  CHECK(apply(LinkFunction::kTanh, 0.5) == std::tanh(0.5));
  CHECK(apply(LinkFunction::kExp, -2.0) == std::exp(-2.0));
  for (auto f : {LinkFunction::kLinear, LinkFunction::kSquare, LinkFunction::kCos,
                 LinkFunction::kTanh, LinkFunction::kExp})
    CHECK(parse_link_function(to_string(f)) == f);
  CHECK_THROWS_AS(parse_link_function("sigmoid"), std::invalid_argument);
}

TEST_CASE("high-dimensional weights are L1 normalized and X is bounded") {
  HighDimSpec spec{0.6, 10000, 50, 5};
  const HighDimWeights w = highdim_weights(spec);
  CHECK(w.a_f.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.a_g.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.a_f.minCoeff() >= 0.0);
  const Dataset d = gen_highdim(spec);
  CHECK(d.x.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(d.y.cwiseAbs().maxCoeff() <= 1.0);
  // Recover the X noise through arcsin; folding beyond pi/2 is rare at this scale.
  const Vector noise = d.x.col(0).array().asin().matrix() - d.z * w.a_f;
  CHECK(std::abs(noise.mean()) < 0.02);
  CHECK(std::abs(sample_variance(noise) / 0.25 - 1.0) < 0.05);
}

TEST_CASE("high-dimensional weights do not depend on n") {
  const HighDimWeights a = highdim_weights(HighDimSpec{0.0, 100, 20, 6});
  const HighDimWeights b = highdim_weights(HighDimSpec{0.0, 5000, 20, 6});
  CHECK(a.a_f == b.a_f);
  CHECK(a.a_g == b.a_g);
}

TEST_CASE("chain: Y moments, weight ranges and residual noise") {
  ChainSpec spec{3, 2, 10000, 7};
  const ChainWeights w = chain_weights(spec);
  CHECK(w.u1.minCoeff() >= 0.0);
  CHECK(w.u1.maxCoeff() <= 0.3);
  CHECK(w.u2.minCoeff() >= 0.0);
  CHECK(w.u2.maxCoeff() <= 0.3);
  const Dataset d = gen_chain(spec);
  CHECK(d.x.cols() == 2);
  CHECK(d.z.cols() == 3);
  CHECK(std::abs(sample_mean(d.y) - 1.0) < 0.05);
  CHECK(std::abs(sample_variance(d.y) - 1.0) < 0.05);
  const Matrix ez = d.z - d.y * w.u1.transpose();
  const Matrix ex = d.x - d.z * w.u2;
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(std::abs(ez.col(j).mean()) < 0.05);
    CHECK(std::abs(sample_variance(ez.col(j)) - 1.0) < 0.05);
  }
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(std::abs(ex.col(j).mean()) < 0.05);
    CHECK(std::abs(sample_variance(ex.col(j)) - 1.0) < 0.05);
  }
}
