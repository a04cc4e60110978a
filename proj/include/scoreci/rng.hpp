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

#ifndef SCORECI_RNG_HPP_
#define SCORECI_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace scoreci {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for stream (a, b) of `parent`. Distinct (a, b) give
// statistically independent children; the mapping is fixed across
// platforms.
constexpr Seed derive_seed(Seed parent, std::uint64_t a,
                           std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(parent) ^ (a + 0x632be59bd9b4e019ULL)) ^
               (b + 0x2545f4914f6cdd1dULL));
}

// Named streams drawn from a master seed.
enum class SeedStream : std::uint64_t {
  kTrain = 1,
  kInit = 2,
  kSampler = 3,
  kGof = 4,
  kStatistic = 5,
  kData = 6,
  kTest = 7,
};

constexpr Seed derive_seed(Seed parent, SeedStream stream) noexcept {
  return derive_seed(parent, static_cast<std::uint64_t>(stream));
}

// Runs body(i) for i in [0, count) on up to `threads` worker threads.
// Work items must write to disjoint locations. The first exception thrown
// by any item is rethrown on the calling thread.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace scoreci

#endif  // SCORECI_RNG_HPP_
