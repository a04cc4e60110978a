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

// Seeded generators for the synthetic CI benchmarks. Every generator is a
// pure function of its spec and attaches the ground-truth CI label.

#ifndef SCORECI_SYNTHGEN_HPP_
#define SCORECI_SYNTHGEN_HPP_

#include <string>
#include <variant>

#include "scoreci/common.hpp"
#include "scoreci/rng.hpp"

namespace scoreci {

enum class LinkFunction { kLinear, kSquare, kCos, kTanh, kExp };

std::string to_string(LinkFunction f);
LinkFunction parse_link_function(const std::string& name);
double apply(LinkFunction f, double u);

// X = f1(a Zbar + b e_b + e_x), Y = f2(a Zbar + b e_b + e_y), Z ~ N(0, I).
// Case 1..4 selects (a, b) in {(0, 0), (0, 0.8), (1, 0), (1, 0.8)}.
struct BenchmarkSpec {
  int case_id = 3;
  LinkFunction f1 = LinkFunction::kLinear;
  LinkFunction f2 = LinkFunction::kLinear;
  int n = 500;
  int d_z = 5;
  Seed seed = 0;

  double alpha_coef() const;
  double beta_coef() const;
  bool ci_holds() const { return case_id == 1 || case_id == 3; }
};

// X = sin(a_f^T Z + e_f), Y = cos(a_g^T Z + b X + e_g), Z ~ N(0, I), with
// a_f, a_g uniform on [0, 1] and l1-normalized, e ~ N(0, 0.25).
struct HighDimSpec {
  double b = 0.0;
  int n = 500;
  int d_z = 50;
  Seed seed = 0;

  bool ci_holds() const { return b == 0.0; }
};

// Y ~ N(1, 1), Z = Y u_1 + e_1, X = Z u_2 + e_2 with u entries uniform on
// [0, 0.3]. Y -> Z -> X, so X is independent of Y given Z.
struct ChainSpec {
  int d_z = 1;
  int d_x = 1;
  int n = 2000;
  Seed seed = 0;

  bool ci_holds() const { return true; }
};

using GeneratorSpec = std::variant<BenchmarkSpec, HighDimSpec, ChainSpec>;

Dataset gen_benchmark(const BenchmarkSpec& spec);
Dataset gen_highdim(const HighDimSpec& spec);
Dataset gen_chain(const ChainSpec& spec);

Dataset generate(const GeneratorSpec& spec);
GeneratorSpec with_seed(GeneratorSpec spec, Seed seed);
bool ci_holds(const GeneratorSpec& spec);
std::string describe(const GeneratorSpec& spec);

// Weight vectors drawn by the generators, exposed for inspection.
struct HighDimWeights {
  Vector a_f;
  Vector a_g;
};
HighDimWeights highdim_weights(const HighDimSpec& spec);

struct ChainWeights {
  Vector u1;
  Matrix u2;  // d_z x d_x
};
ChainWeights chain_weights(const ChainSpec& spec);

}  // namespace scoreci

#endif  // SCORECI_SYNTHGEN_HPP_
