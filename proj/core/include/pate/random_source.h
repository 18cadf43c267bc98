// Copyright 2026 The PATE Accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATE_RANDOM_SOURCE_H_
#define PATE_RANDOM_SOURCE_H_

#include <cstdint>
#include <random>

namespace pate {

// 64-bit mixing function (splitmix64 finalizer).
uint64_t Mix64(uint64_t x);

// Seed for an independent per-query stream derived from a root seed.
uint64_t DeriveSeed(uint64_t root_seed, uint64_t query_id);

// Seeded, single-consumer source of randomness.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard, and all variates are produced by the transforms below rather
// than the implementation-defined <random> distributions. A given seed and
// call sequence therefore yields bit-identical draws on every platform.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed) : seed_(seed), engine_(seed) {}

  static RandomSource ForQuery(uint64_t root_seed, uint64_t query_id) {
    return RandomSource(DeriveSeed(root_seed, query_id));
  }

  uint64_t seed() const { return seed_; }

  uint64_t NextBits() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform();

  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);

  // N(0, 1) via Box-Muller; consumes exactly two engine outputs.
  double StandardNormal();

  // Laplace(0, 1) via inverse CDF; consumes exactly one engine output.
  double Laplace();

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pate

#endif  // PATE_RANDOM_SOURCE_H_
