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

#include "scoreci/synthgen.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace scoreci {
namespace {

Matrix standard_normal(Engine& engine, Eigen::Index rows, Eigen::Index cols,
                       double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> normal(mean, sd);
  Matrix m(rows, cols);
  // Row-major draw order so row i depends only on draws made for rows <= i.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(engine);
  return m;
}

Vector uniform_vector(Engine& engine, Eigen::Index size, double lo, double hi) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = uniform(engine);
  return v;
}

// Weights and data come from separate streams so that n does not change
// the weights.
Engine weight_engine(Seed seed) { return Engine(derive_seed(seed, 0xA11CE)); }
Engine data_engine(Seed seed) { return Engine(derive_seed(seed, 0xDA7A)); }

}  // namespace

std::string to_string(LinkFunction f) {
  switch (f) {
    case LinkFunction::kLinear: return "linear";
    case LinkFunction::kSquare: return "square";
    case LinkFunction::kCos: return "cos";
    case LinkFunction::kTanh: return "tanh";
    case LinkFunction::kExp: return "exp";
  }
  return "unknown";
}

LinkFunction parse_link_function(const std::string& name) {
  if (name == "linear") return LinkFunction::kLinear;
  if (name == "square") return LinkFunction::kSquare;
  if (name == "cos") return LinkFunction::kCos;
  if (name == "tanh") return LinkFunction::kTanh;
  if (name == "exp") return LinkFunction::kExp;
  throw std::invalid_argument("unknown function '" + name +
                              "' (expected linear, square, cos, tanh or exp)");
}

double apply(LinkFunction f, double u) {
  switch (f) {
    case LinkFunction::kLinear: return u;
    case LinkFunction::kSquare: return u * u;
    case LinkFunction::kCos: return std::cos(u);
    case LinkFunction::kTanh: return std::tanh(u);
    case LinkFunction::kExp: return std::exp(-std::abs(u));
  }
  return u;
}

double BenchmarkSpec::alpha_coef() const {
  return case_id == 3 || case_id == 4 ? 1.0 : 0.0;
}

double BenchmarkSpec::beta_coef() const {
  return case_id == 2 || case_id == 4 ? 0.8 : 0.0;
}

Dataset gen_benchmark(const BenchmarkSpec& spec) {
  require(spec.case_id >= 1 && spec.case_id <= 4, "benchmark: case must be 1..4");
  require(spec.n >= 1, "benchmark: n must be >= 1");
  require(spec.d_z >= 1, "benchmark: d_z must be >= 1");
  Engine engine = data_engine(spec.seed);
  Dataset out;
  out.z = standard_normal(engine, spec.n, spec.d_z);
  const Matrix noise = standard_normal(engine, spec.n, 3);  // e_b, e_x, e_y
  const double a = spec.alpha_coef();
  const double b = spec.beta_coef();
  out.x.resize(spec.n, 1);
  out.y.resize(spec.n, 1);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const double shared = a * out.z.row(i).mean() + b * noise(i, 0);
    out.x(i, 0) = apply(spec.f1, shared + noise(i, 1));
    out.y(i, 0) = apply(spec.f2, shared + noise(i, 2));
  }
  out.ci_holds = spec.ci_holds();
  return out;
}

HighDimWeights highdim_weights(const HighDimSpec& spec) {
  require(spec.d_z >= 1, "highdim: d_z must be >= 1");
  Engine engine = weight_engine(spec.seed);
  HighDimWeights w;
  w.a_f = uniform_vector(engine, spec.d_z, 0.0, 1.0);
  w.a_g = uniform_vector(engine, spec.d_z, 0.0, 1.0);
  w.a_f /= w.a_f.lpNorm<1>();
  w.a_g /= w.a_g.lpNorm<1>();
  return w;
}

Dataset gen_highdim(const HighDimSpec& spec) {
  require(spec.n >= 1, "highdim: n must be >= 1");
  require(spec.b >= 0.0, "highdim: b must be >= 0");
  const HighDimWeights w = highdim_weights(spec);
  Engine engine = data_engine(spec.seed);
  Dataset out;
  out.z = standard_normal(engine, spec.n, spec.d_z);
  const Matrix noise = standard_normal(engine, spec.n, 2, 0.0, 0.5);
  const Vector zf = out.z * w.a_f;
  const Vector zg = out.z * w.a_g;
  out.x.resize(spec.n, 1);
  out.y.resize(spec.n, 1);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    out.x(i, 0) = std::sin(zf(i) + noise(i, 0));
    out.y(i, 0) = std::cos(zg(i) + spec.b * out.x(i, 0) + noise(i, 1));
  }
  out.ci_holds = spec.ci_holds();
  return out;
}

ChainWeights chain_weights(const ChainSpec& spec) {
  require(spec.d_z >= 1 && spec.d_x >= 1, "chain: d_z and d_x must be >= 1");
  Engine engine = weight_engine(spec.seed);
  ChainWeights w;
  w.u1 = uniform_vector(engine, spec.d_z, 0.0, 0.3);
  w.u2.resize(spec.d_z, spec.d_x);
  for (Eigen::Index j = 0; j < spec.d_x; ++j)
    w.u2.col(j) = uniform_vector(engine, spec.d_z, 0.0, 0.3);
  return w;
}

Dataset gen_chain(const ChainSpec& spec) {
  require(spec.n >= 1, "chain: n must be >= 1");
  const ChainWeights w = chain_weights(spec);
  Engine engine = data_engine(spec.seed);
  Dataset out;
  out.y = standard_normal(engine, spec.n, 1, 1.0, 1.0);
  out.z = out.y * w.u1.transpose() + standard_normal(engine, spec.n, spec.d_z);
  out.x = out.z * w.u2 + standard_normal(engine, spec.n, spec.d_x);
  out.ci_holds = true;
  return out;
}

Dataset generate(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& s) -> Dataset {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BenchmarkSpec>) return gen_benchmark(s);
        else if constexpr (std::is_same_v<T, HighDimSpec>) return gen_highdim(s);
        else return gen_chain(s);
      },
      spec);
}

GeneratorSpec with_seed(GeneratorSpec spec, Seed seed) {
  std::visit([seed](auto& s) { s.seed = seed; }, spec);
  return spec;
}

bool ci_holds(const GeneratorSpec& spec) {
  return std::visit([](const auto& s) { return s.ci_holds(); }, spec);
}

std::string describe(const GeneratorSpec& spec) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BenchmarkSpec>) {
          out << "benchmark case=" << s.case_id << " f1=" << to_string(s.f1)
              << " f2=" << to_string(s.f2) << " n=" << s.n << " dz=" << s.d_z;
        } else if constexpr (std::is_same_v<T, HighDimSpec>) {
          out << "highdim b=" << s.b << " n=" << s.n << " dz=" << s.d_z;
        } else {
          out << "chain dz=" << s.d_z << " dx=" << s.d_x << " n=" << s.n;
        }
      },
      spec);
  return out.str();
}

}  // namespace scoreci
