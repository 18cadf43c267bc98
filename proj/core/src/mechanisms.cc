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

#include "pate/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace pate {
namespace {

bool PositiveFinite(double x) { return std::isfinite(x) && x > 0.0; }

template <typename Noise>
int NoisyArgMax(const VoteHistogram& h, Noise&& noise) {
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < h.num_classes(); ++i) {
    const double value = static_cast<double>(h.count(i)) + noise();
    if (value > best_value) {
      best = i;
      best_value = value;
    }
  }
  return best;
}

}  // namespace

std::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kLnMax:
      return "lnmax";
    case Mechanism::kGnMax:
      return "gnmax";
    case Mechanism::kConfident:
      return "confident";
    case Mechanism::kInteractive:
      return "interactive";
  }
  return "unknown";
}

std::optional<Mechanism> ParseMechanism(std::string_view name) {
  for (Mechanism m : {Mechanism::kLnMax, Mechanism::kGnMax,
                      Mechanism::kConfident, Mechanism::kInteractive}) {
    if (MechanismName(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view OutcomeName(AggregationOutcome::Kind kind) {
  switch (kind) {
    case AggregationOutcome::Kind::kTeacherLabel:
      return "teacher";
    case AggregationOutcome::Kind::kReinforceStudent:
      return "reinforce";
    case AggregationOutcome::Kind::kNoAnswer:
      return "none";
  }
  return "unknown";
}

absl::Status ConfidentConfig::Validate() const {
  if (!PositiveFinite(threshold)) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold must be positive, got ", threshold));
  }
  if (!PositiveFinite(sigma1) || !PositiveFinite(sigma2)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sigma1 and sigma2 must be positive, got ", sigma1, ", ", sigma2));
  }
  return absl::OkStatus();
}

ConfidentConfig ConfidentConfig::WithDefaults(int64_t num_teachers,
                                              double sigma2) {
  return {.threshold = 0.7 * static_cast<double>(num_teachers),
          .sigma1 = 3.0 * sigma2,
          .sigma2 = sigma2};
}

absl::Status InteractiveConfig::Validate() const {
  if (!PositiveFinite(threshold)) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold must be positive, got ", threshold));
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in (0, 1), got ", gamma));
  }
  if (!PositiveFinite(sigma1) || !PositiveFinite(sigma2)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sigma1 and sigma2 must be positive, got ", sigma1, ", ", sigma2));
  }
  if (num_teachers < 1) {
    return absl::InvalidArgumentError("num_teachers must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<int> GnMax(const VoteHistogram& h, double sigma,
                          RandomSource& rng) {
  if (!PositiveFinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be positive, got ", sigma));
  }
  return NoisyArgMax(h, [&] { return sigma * rng.StandardNormal(); });
}

absl::StatusOr<int> LnMax(const VoteHistogram& h, double gamma,
                          RandomSource& rng) {
  if (!PositiveFinite(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must be positive, got ", gamma));
  }
  const double scale = 1.0 / gamma;
  return NoisyArgMax(h, [&] { return scale * rng.Laplace(); });
}

absl::StatusOr<AggregationOutcome> ConfidentGnMax(const VoteHistogram& h,
                                                  const ConfidentConfig& config,
                                                  RandomSource& rng) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const double noisy_max = static_cast<double>(h.MaxCount()) +
                           config.sigma1 * rng.StandardNormal();
  if (noisy_max < config.threshold) return AggregationOutcome::NoAnswer();
  absl::StatusOr<int> label = GnMax(h, config.sigma2, rng);
  if (!label.ok()) return label.status();
  return AggregationOutcome::TeacherLabel(*label);
}

absl::Status ValidateStudentProbabilities(const VoteHistogram& h,
                                          std::span<const double> probs) {
  if (static_cast<int>(probs.size()) != h.num_classes()) {
    return absl::InvalidArgumentError(
        absl::StrCat("student probabilities have ", probs.size(),
                     " classes, histogram has ", h.num_classes()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("student probability out of range: ", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("student probabilities sum to ", sum, ", not 1"));
  }
  return absl::OkStatus();
}

double MaxDisagreement(const VoteHistogram& h, std::span<const double> probs,
                       int64_t num_teachers) {
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < h.num_classes(); ++j) {
    best = std::max(best, static_cast<double>(h.count(j)) -
                              static_cast<double>(num_teachers) * probs[j]);
  }
  return best;
}

absl::StatusOr<AggregationOutcome> InteractiveGnMax(
    const VoteHistogram& h, std::span<const double> student_probs,
    const InteractiveConfig& config, RandomSource& rng) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (absl::Status s = ValidateStudentProbabilities(h, student_probs);
      !s.ok()) {
    return s;
  }
  if (config.num_teachers != h.num_teachers()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config expects ", config.num_teachers,
                     " teachers, histogram has ", h.num_teachers()));
  }
  const double noisy_disagreement =
      MaxDisagreement(h, student_probs, config.num_teachers) +
      config.sigma1 * rng.StandardNormal();
  if (noisy_disagreement >= config.threshold) {
    absl::StatusOr<int> label = GnMax(h, config.sigma2, rng);
    if (!label.ok()) return label.status();
    return AggregationOutcome::TeacherLabel(*label);
  }
  const auto top = std::max_element(student_probs.begin(), student_probs.end());
  if (*top > config.gamma) {
    return AggregationOutcome::ReinforceStudent(
        static_cast<int>(top - student_probs.begin()));
  }
  return AggregationOutcome::NoAnswer();
}

}  // namespace pate
