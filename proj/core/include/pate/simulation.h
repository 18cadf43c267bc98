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

// Synthetic teacher ensembles and privacy/utility sweeps over them.

#ifndef PATE_SIMULATION_H_
#define PATE_SIMULATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pate/accountant.h"
#include "pate/histogram.h"
#include "pate/mechanisms.h"

namespace pate {

// Each query has a true label drawn from class_weights. With probability
// mislabel_rate the teachers agree on a different, uniformly chosen class
// instead. Each teacher votes for the agreed class with the query's accuracy
// and uniformly for one of the other classes otherwise. The query accuracy is
// teacher_accuracy + accuracy_spread * (U - 1/2), clamped to [0, 1].
struct EnsembleModel {
  int64_t n_teachers = 0;
  int num_classes = 0;
  double teacher_accuracy = 0.0;
  double accuracy_spread = 0.0;
  std::vector<double> class_weights;
  double mislabel_rate = 0.0;

  absl::Status Validate() const;

  // 150 classes, 5000 teachers, the most frequent class 5 times as likely as
  // the rarest, 10% mislabeled.
  static EnsembleModel GlyphLike();
  // 10 balanced classes, 250 accurate teachers.
  static EnsembleModel MnistLike();
  // Uniform class weights over `num_classes`.
  static std::vector<double> UniformWeights(int num_classes);
};

struct GeneratedVotes {
  std::vector<VoteHistogram> votes;
  std::vector<int> true_labels;
};

// Query k is generated from RandomSource::ForQuery(seed, k), so the output
// does not depend on how queries are scheduled.
absl::StatusOr<GeneratedVotes> GenerateVotes(const EnsembleModel& model,
                                             int64_t num_queries,
                                             uint64_t seed);

struct SweepGrid {
  std::vector<Mechanism> mechanisms = {Mechanism::kGnMax, Mechanism::kLnMax};
  // Gaussian sigma (sigma2 for Confident-GNMax) or Laplace scale 1/gamma.
  std::vector<double> noise = {50, 100, 200};
  // Confident-GNMax thresholds as fractions of the ensemble size.
  std::vector<double> threshold_fractions = {0.7};
  double sigma1_ratio = 3.0;  // Confident-GNMax sigma1 / sigma2.
  // Ensemble sizes; empty means the model's own size.
  std::vector<int64_t> ensemble_sizes;
  int64_t num_queries = 1000;
  double delta = 1e-5;

  absl::Status Validate() const;
};

struct SweepCell {
  Mechanism mechanism;
  double noise;
  double threshold;  // 0 for mechanisms without a threshold.
  int64_t n_teachers;
  double epsilon;
  double order;
  double accuracy;  // Over answered queries; 0 if none were answered.
  double answered_fraction;
};

// Runs every (mechanism, noise, threshold, ensemble size) cell. Votes depend
// only on (seed, ensemble size) and mechanism noise only on (seed,
// mechanism, query), so cells differ by their parameters alone. Cells run
// concurrently; the result order is fixed.
absl::StatusOr<std::vector<SweepCell>> Sweep(const EnsembleModel& model,
                                             const SweepGrid& grid,
                                             uint64_t seed);

std::string FormatSweepCsv(const std::vector<SweepCell>& cells);

}  // namespace pate

#endif  // PATE_SIMULATION_H_
