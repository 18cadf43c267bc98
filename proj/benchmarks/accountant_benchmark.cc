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

#include <cmath>
#include <vector>

#include "benchmark/benchmark.h"
#include "pate/accountant.h"
#include "pate/histogram.h"
#include "pate/simulation.h"

namespace pate {
namespace {

void BM_ComputeQ(benchmark::State& state) {
  const auto g = *GenerateVotes(EnsembleModel::GlyphLike(), 64, 1);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeQ(g.votes[i++ % g.votes.size()], 100.0));
  }
}
BENCHMARK(BM_ComputeQ);

void BM_DataDependentRdpGaussian(benchmark::State& state) {
  double log_q = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(DataDependentRdpGaussian(log_q, 20.0, 100.0));
    log_q = log_q < -40 ? -1.0 : log_q - 0.37;
  }
}
BENCHMARK(BM_DataDependentRdpGaussian);

void BM_CriticalQ0(benchmark::State& state) {
  double sigma = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(CriticalQ0(sigma, 20.0));
    sigma = sigma > 200 ? 50 : sigma + 1;
  }
}
BENCHMARK(BM_CriticalQ0);

void BM_AnalyzeRun(benchmark::State& state) {
  const auto g = *GenerateVotes(EnsembleModel::MnistLike(), state.range(0), 2);
  AnalysisInputs inputs{.votes = g.votes};
  AnalysisConfig config{.mechanism = Mechanism::kGnMax, .sigma = 40.0};
  for (auto _ : state) benchmark::DoNotOptimize(AnalyzeRun(inputs, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnalyzeRun)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace pate
