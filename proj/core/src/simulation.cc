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

#include "pate/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "pate/random_source.h"

namespace pate {
namespace {

constexpr uint64_t kVotesStream = 0x766f746573ULL;
constexpr uint64_t kNoiseStream = 0x6e6f697365ULL;

int OtherClass(int excluded, int num_classes, RandomSource& rng) {
  const int c = static_cast<int>(rng.UniformInt(num_classes - 1));
  return c >= excluded ? c + 1 : c;
}

int SampleClass(const std::vector<double>& weights, RandomSource& rng) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

template <typename F>
void ParallelFor(size_t n, F&& f) {
  const size_t workers = std::min<size_t>(
      n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (std::thread& t : threads) t.join();
}

}  // namespace

absl::Status EnsembleModel::Validate() const {
  if (n_teachers < 1) {
    return absl::InvalidArgumentError("n_teachers must be at least 1");
  }
  if (num_classes < 2) {
    return absl::InvalidArgumentError("num_classes must be at least 2");
  }
  if (!(teacher_accuracy > 0.0 && teacher_accuracy <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "teacher_accuracy must lie in (0, 1], got ", teacher_accuracy));
  }
  if (!(accuracy_spread >= 0.0 && accuracy_spread <= 2.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "accuracy_spread must lie in [0, 2], got ", accuracy_spread));
  }
  if (!(mislabel_rate >= 0.0 && mislabel_rate < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mislabel_rate must lie in [0, 1), got ", mislabel_rate));
  }
  if (static_cast<int>(class_weights.size()) != num_classes) {
    return absl::InvalidArgumentError(
        absl::StrCat("class_weights has ", class_weights.size(),
                     " entries for ", num_classes, " classes"));
  }
  double sum = 0.0;
  for (double w : class_weights) {
    if (!(w >= 0.0)) {
      return absl::InvalidArgumentError("class weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("class weights sum to ", sum, ", not 1"));
  }
  return absl::OkStatus();
}

std::vector<double> EnsembleModel::UniformWeights(int num_classes) {
  return std::vector<double>(num_classes, 1.0 / num_classes);
}

EnsembleModel EnsembleModel::GlyphLike() {
  constexpr int kClasses = 150;
  std::vector<double> weights(kClasses);
  double sum = 0.0;
  for (int i = 0; i < kClasses; ++i) {
    weights[i] = 5.0 - 4.0 * i / (kClasses - 1);
    sum += weights[i];
  }
  for (double& w : weights) w /= sum;
  return {.n_teachers = 5000,
          .num_classes = kClasses,
          .teacher_accuracy = 0.3,
          .accuracy_spread = 0.6,
          .class_weights = std::move(weights),
          .mislabel_rate = 0.1};
}

EnsembleModel EnsembleModel::MnistLike() {
  return {.n_teachers = 250,
          .num_classes = 10,
          .teacher_accuracy = 0.9,
          .accuracy_spread = 0.2,
          .class_weights = UniformWeights(10),
          .mislabel_rate = 0.01};
}

absl::StatusOr<GeneratedVotes> GenerateVotes(const EnsembleModel& model,
                                             int64_t num_queries,
                                             uint64_t seed) {
  if (absl::Status s = model.Validate(); !s.ok()) return s;
  if (num_queries < 0) {
    return absl::InvalidArgumentError("num_queries must be non-negative");
  }
  GeneratedVotes out;
  out.votes.reserve(num_queries);
  out.true_labels.reserve(num_queries);
  const int m = model.num_classes;
  std::vector<int64_t> counts(m);
  for (int64_t k = 0; k < num_queries; ++k) {
    RandomSource rng = RandomSource::ForQuery(seed, k);
    const int label = SampleClass(model.class_weights, rng);
    const int agreed =
        rng.Uniform() < model.mislabel_rate ? OtherClass(label, m, rng) : label;
    const double accuracy =
        std::clamp(model.teacher_accuracy +
                       model.accuracy_spread * (rng.Uniform() - 0.5),
                   0.0, 1.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int64_t t = 0; t < model.n_teachers; ++t) {
      const int vote =
          rng.Uniform() < accuracy ? agreed : OtherClass(agreed, m, rng);
      ++counts[vote];
    }
    absl::StatusOr<VoteHistogram> h = VoteHistogram::Create(counts);
    if (!h.ok()) return h.status();
    out.votes.push_back(*std::move(h));
    out.true_labels.push_back(label);
  }
  return out;
}

absl::Status SweepGrid::Validate() const {
  if (mechanisms.empty() || noise.empty()) {
    return absl::InvalidArgumentError("sweep grid needs mechanisms and noise");
  }
  for (Mechanism m : mechanisms) {
    if (m == Mechanism::kInteractive) {
      return absl::InvalidArgumentError(
          "interactive aggregation needs a student and is not swept");
    }
  }
  for (double s : noise) {
    if (!(std::isfinite(s) && s > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("noise levels must be positive, got ", s));
    }
  }
  for (double t : threshold_fractions) {
    if (!(t > 0.0 && t <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("threshold fractions must lie in (0, 1], got ", t));
    }
  }
  if (std::find(mechanisms.begin(), mechanisms.end(), Mechanism::kConfident) !=
          mechanisms.end() &&
      threshold_fractions.empty()) {
    return absl::InvalidArgumentError(
        "confident sweeps need at least one threshold fraction");
  }
  if (!(sigma1_ratio > 0.0)) {
    return absl::InvalidArgumentError("sigma1_ratio must be positive");
  }
  for (int64_t n : ensemble_sizes) {
    if (n < 1) return absl::InvalidArgumentError("ensemble sizes must be >= 1");
  }
  if (num_queries < 1) {
    return absl::InvalidArgumentError("num_queries must be at least 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<SweepCell>> Sweep(const EnsembleModel& model,
                                             const SweepGrid& grid,
                                             uint64_t seed) {
  if (absl::Status s = model.Validate(); !s.ok()) return s;
  if (absl::Status s = grid.Validate(); !s.ok()) return s;
  std::vector<int64_t> sizes = grid.ensemble_sizes;
  if (sizes.empty()) sizes.push_back(model.n_teachers);

  std::map<int64_t, GeneratedVotes> votes;
  for (int64_t n : sizes) {
    if (votes.contains(n)) continue;
    EnsembleModel sized = model;
    sized.n_teachers = n;
    absl::StatusOr<GeneratedVotes> v =
        GenerateVotes(sized, grid.num_queries, DeriveSeed(seed ^ kVotesStream,
                                                          n));
    if (!v.ok()) return v.status();
    votes.emplace(n, *std::move(v));
  }

  std::vector<SweepCell> cells;
  for (int64_t n : sizes) {
    for (Mechanism mech : grid.mechanisms) {
      for (double noise : grid.noise) {
        if (mech == Mechanism::kConfident) {
          for (double t : grid.threshold_fractions) {
            cells.push_back({mech, noise, t * static_cast<double>(n), n, 0, 0,
                             0, 0});
          }
        } else {
          cells.push_back({mech, noise, 0.0, n, 0, 0, 0, 0});
        }
      }
    }
  }

  std::vector<absl::Status> errors(cells.size());
  ParallelFor(cells.size(), [&](size_t i) {
    SweepCell& cell = cells[i];
    const GeneratedVotes& run = votes.at(cell.n_teachers);
    const uint64_t noise_seed =
        DeriveSeed(seed ^ kNoiseStream, static_cast<uint64_t>(cell.mechanism));
    AnalysisConfig config;
    config.mechanism = cell.mechanism;
    config.delta = grid.delta;
    ConfidentConfig confident{.threshold = cell.threshold,
                              .sigma1 = grid.sigma1_ratio * cell.noise,
                              .sigma2 = cell.noise};
    switch (cell.mechanism) {
      case Mechanism::kGnMax:
        config.sigma = cell.noise;
        break;
      case Mechanism::kLnMax:
        config.gamma = 1.0 / cell.noise;
        break;
      default:
        config.threshold = confident.threshold;
        config.sigma1 = confident.sigma1;
        config.sigma2 = confident.sigma2;
        break;
    }

    int64_t answered = 0;
    int64_t correct = 0;
    for (size_t k = 0; k < run.votes.size(); ++k) {
      RandomSource rng = RandomSource::ForQuery(noise_seed, k);
      const VoteHistogram& h = run.votes[k];
      absl::StatusOr<int> label = -1;
      switch (cell.mechanism) {
        case Mechanism::kGnMax:
          label = GnMax(h, cell.noise, rng);
          break;
        case Mechanism::kLnMax:
          label = LnMax(h, config.gamma, rng);
          break;
        default: {
          absl::StatusOr<AggregationOutcome> outcome =
              ConfidentGnMax(h, confident, rng);
          if (!outcome.ok()) {
            label = outcome.status();
          } else {
            label = outcome->label;
          }
          break;
        }
      }
      if (!label.ok()) {
        errors[i] = label.status();
        return;
      }
      if (*label < 0) continue;
      ++answered;
      if (*label == run.true_labels[k]) ++correct;
    }

    absl::StatusOr<RunReport> report =
        AnalyzeRun({.votes = run.votes, .student_probs = {}, .answered = {}},
                   config);
    if (!report.ok()) {
      errors[i] = report.status();
      return;
    }
    cell.epsilon = report->dp.epsilon;
    cell.order = report->dp.order;
    cell.answered_fraction =
        static_cast<double>(answered) / static_cast<double>(run.votes.size());
    cell.accuracy = answered == 0 ? 0.0
                                  : static_cast<double>(correct) /
                                        static_cast<double>(answered);
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  return cells;
}

std::string FormatSweepCsv(const std::vector<SweepCell>& cells) {
  std::string out =
      "mechanism,sigma,threshold,n_teachers,epsilon,order,accuracy,"
      "answered_fraction\n";
  for (const SweepCell& c : cells) {
    absl::StrAppendFormat(&out, "%s,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n",
                          std::string(MechanismName(c.mechanism)), c.noise, c.threshold,
                          c.n_teachers, c.epsilon, c.order, c.accuracy,
                          c.answered_fraction);
  }
  return out;
}

}  // namespace pate
