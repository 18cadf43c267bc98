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

#include "benchmark/benchmark.h"
#include "pate/histogram.h"
#include "pate/mechanisms.h"
#include "pate/random_source.h"
#include "pate/simulation.h"

namespace pate {
namespace {

void BM_GnMax(benchmark::State& state) {
  const auto g = *GenerateVotes(EnsembleModel::GlyphLike(), 1, 3);
  RandomSource rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(GnMax(g.votes[0], 100.0, rng));
}
BENCHMARK(BM_GnMax);

void BM_LnMax(benchmark::State& state) {
  const auto g = *GenerateVotes(EnsembleModel::GlyphLike(), 1, 3);
  RandomSource rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(LnMax(g.votes[0], 0.01, rng));
}
BENCHMARK(BM_LnMax);

void BM_ConfidentGnMax(benchmark::State& state) {
  const auto g = *GenerateVotes(EnsembleModel::GlyphLike(), 1, 3);
  const ConfidentConfig config{.threshold = 3500, .sigma1 = 1500, .sigma2 = 100};
  RandomSource rng(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ConfidentGnMax(g.votes[0], config, rng));
  }
}
BENCHMARK(BM_ConfidentGnMax);

}  // namespace
}  // namespace pate
