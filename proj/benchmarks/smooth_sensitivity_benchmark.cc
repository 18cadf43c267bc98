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
#include "pate/simulation.h"
#include "pate/smooth_sensitivity.h"

namespace pate {
namespace {

void BM_Series(benchmark::State& state) {
  const auto g = *GenerateVotes(EnsembleModel::MnistLike(), 64, 7);
  const auto sens = *GnmaxSensitivity::Create(40.0, 14.0, 10);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sens.Series(g.votes[i++ % g.votes.size()]));
  }
}
BENCHMARK(BM_Series);

void BM_SmoothSensitivity(benchmark::State& state) {
  const auto g = *GenerateVotes(EnsembleModel::MnistLike(), 64, 8);
  const auto sens = *GnmaxSensitivity::Create(40.0, 14.0, 10);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sens.SmoothSensitivity(g.votes[i++ % g.votes.size()], 0.4 / 14));
  }
}
BENCHMARK(BM_SmoothSensitivity);

void BM_CreateSensitivity(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(GnmaxSensitivity::Create(40.0, 14.0, 10));
  }
}
BENCHMARK(BM_CreateSensitivity);

}  // namespace
}  // namespace pate
