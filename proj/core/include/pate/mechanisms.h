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

// Noisy aggregation of teacher votes.
//
// All mechanisms take an explicit RandomSource and are otherwise pure. Noisy
// argmax ties (a probability-zero event under continuous noise) go to the
// lowest class index.

#ifndef PATE_MECHANISMS_H_
#define PATE_MECHANISMS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pate/histogram.h"
#include "pate/random_source.h"

namespace pate {

enum class Mechanism { kLnMax, kGnMax, kConfident, kInteractive };

std::string_view MechanismName(Mechanism mechanism);
std::optional<Mechanism> ParseMechanism(std::string_view name);

// Noisy threshold check followed by GNMax.
struct ConfidentConfig {
  double threshold = 0.0;
  double sigma1 = 0.0;  // Threshold-check noise.
  double sigma2 = 0.0;  // Answer noise.

  absl::Status Validate() const;

  // Threshold at 0.7 of the ensemble and sigma1 = 3 * sigma2.
  static ConfidentConfig WithDefaults(int64_t num_teachers, double sigma2);
};

// Threshold check on teacher/student disagreement, then GNMax, with a
// fallback that reinforces a confident student.
struct InteractiveConfig {
  double threshold = 0.0;
  double gamma = 0.0;  // Student confidence needed for reinforcement, (0, 1).
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  int64_t num_teachers = 0;

  absl::Status Validate() const;
};

struct AggregationOutcome {
  enum class Kind { kTeacherLabel, kReinforceStudent, kNoAnswer };

  static AggregationOutcome TeacherLabel(int label) {
    return {Kind::kTeacherLabel, label};
  }
  static AggregationOutcome ReinforceStudent(int label) {
    return {Kind::kReinforceStudent, label};
  }
  static AggregationOutcome NoAnswer() { return {Kind::kNoAnswer, -1}; }

  bool answered() const { return kind == Kind::kTeacherLabel; }

  friend bool operator==(const AggregationOutcome&,
                         const AggregationOutcome&) = default;

  Kind kind;
  int label;  // -1 for kNoAnswer.
};

std::string_view OutcomeName(AggregationOutcome::Kind kind);

// argmax_i { n_i + N(0, sigma^2) }. Draws one normal per class.
absl::StatusOr<int> GnMax(const VoteHistogram& h, double sigma,
                          RandomSource& rng);

// argmax_i { n_i + Lap(1 / gamma) }. Draws one Laplace variate per class.
absl::StatusOr<int> LnMax(const VoteHistogram& h, double gamma,
                          RandomSource& rng);

// Answers with GNMax(sigma2) only if max_i n_i + N(0, sigma1^2) >= T. The
// threshold draw happens first; the answer draws only if it passes.
absl::StatusOr<AggregationOutcome> ConfidentGnMax(const VoteHistogram& h,
                                                  const ConfidentConfig& config,
                                                  RandomSource& rng);

// Teacher label if max_j { n_j - M p_j } + N(0, sigma1^2) >= T; otherwise
// reinforce the student's argmax when max_j p_j > gamma; otherwise nothing.
absl::StatusOr<AggregationOutcome> InteractiveGnMax(
    const VoteHistogram& h, std::span<const double> student_probs,
    const InteractiveConfig& config, RandomSource& rng);

// Validates that `probs` is a distribution over h.num_classes() classes.
absl::Status ValidateStudentProbabilities(const VoteHistogram& h,
                                          std::span<const double> probs);

// max_j { n_j - M p_j }, the statistic the interactive threshold sees.
double MaxDisagreement(const VoteHistogram& h, std::span<const double> probs,
                       int64_t num_teachers);

}  // namespace pate

#endif  // PATE_MECHANISMS_H_
