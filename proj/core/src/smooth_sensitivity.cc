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

#include "pate/smooth_sensitivity.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "pate/accountant.h"
#include "pate/special_functions.h"

namespace pate {
namespace {

constexpr int kConditionGridPoints = 10000;
constexpr double kConditionTolerance = -1e-12;

// Removes `d` units from the non-top bars of a descending vector by
// repeatedly decrementing the current largest one. Requires sum of the
// non-top bars > d.
void DrainSecondHighest(std::vector<int64_t>& sorted, int64_t d) {
  std::span<int64_t> tail(sorted.begin() + 1, sorted.end());
  // Level L is the largest value with sum max(0, tail_i - L) >= d.
  int64_t removed = 0;
  size_t above = 0;  // Bars strictly above the current level.
  int64_t level = tail.empty() ? 0 : tail[0];
  while (true) {
    while (above < tail.size() && tail[above] >= level) ++above;
    const int64_t next =
        above < tail.size() ? std::max<int64_t>(tail[above], 0) : 0;
    const int64_t step = level - next;
    const int64_t room = step * static_cast<int64_t>(above);
    if (removed + room >= d || next == 0) {
      const int64_t remaining = d - removed;
      const int64_t full = remaining / static_cast<int64_t>(above);
      const int64_t extra = remaining % static_cast<int64_t>(above);
      level -= full;
      for (size_t i = 0; i < above; ++i) {
        tail[i] = level - (static_cast<int64_t>(i) < extra ? 1 : 0);
      }
      return;
    }
    removed += room;
    level = next;
  }
}

}  // namespace

double NeighborQUpperBound(double q, double sigma, int num_classes) {
  if (q <= 0.0) return 0.0;
  const double half_width = 0.5 * (num_classes - 1);
  const double x = ErfcInv(q / half_width);
  return std::min(half_width * Erfc(x - 1.0 / sigma), 1.0);
}

double NeighborQLowerBound(double q, double sigma, int num_classes) {
  if (q <= 0.0) return 0.0;
  const double half_width = 0.5 * (num_classes - 1);
  const double x = ErfcInv(q / half_width);
  return half_width * Erfc(x + 1.0 / sigma);
}

double DistanceSeries::At(int64_t d) const {
  if (values.empty()) return 0.0;
  const size_t i = std::min(static_cast<size_t>(d), values.size() - 1);
  return values[i];
}

absl::StatusOr<GnmaxSensitivity> GnmaxSensitivity::Create(double sigma,
                                                          double order,
                                                          int num_classes) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be positive, got ", sigma));
  }
  if (!(std::isfinite(order) && order > 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Renyi order must be > 1, got ", order));
  }
  if (num_classes < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 classes, got ", num_classes));
  }
  const double q0 = CriticalQ0(sigma, order);
  const double q1 = NeighborQLowerBound(q0, sigma, num_classes);
  return GnmaxSensitivity(sigma, order, num_classes, q0, q1);
}

double GnmaxSensitivity::RdpCost(double q) const {
  if (q <= 0.0) return 0.0;
  if (q > q0_) return GaussianRdpBound(order_, sigma_);
  return DataDependentRdpGaussian(std::log(q), order_, sigma_).epsilon;
}

double GnmaxSensitivity::LocalSensitivity(double q) const {
  // Every q in (q1, q0] has its upper neighbor above q0, where the cost sits
  // at the data-independent plateau even if the data-dependent bound is
  // discontinuous there.
  if (q1_ <= q && q <= q0_) {
    return GaussianRdpBound(order_, sigma_) - RdpCost(q1_);
  }
  const double cost = RdpCost(q);
  const double up =
      RdpCost(NeighborQUpperBound(q, sigma_, num_classes_)) - cost;
  const double down =
      cost - RdpCost(NeighborQLowerBound(q, sigma_, num_classes_));
  return std::max(up, down);
}

double GnmaxSensitivity::Q(std::span<const int64_t> counts) const {
  return ComputeQ(counts, sigma_).q;
}

GnmaxSensitivity::AtDistanceResult GnmaxSensitivity::AtDistance(
    std::span<const int64_t> counts, int64_t d) const {
  const double q = Q(counts);
  if (q1_ <= q && q <= q0_) return {LocalSensitivity(q), true};

  std::vector<int64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  if (q < q1_) {
    if (sorted[0] - sorted[1] < 2 * d) return {LocalSensitivity(q1_), true};
    sorted[0] -= d;
    sorted[1] += d;
    const double q_prime = Q(sorted);
    if (q_prime > q1_) return {LocalSensitivity(q0_), true};
    return {LocalSensitivity(q_prime), false};
  }

  int64_t rest = 0;
  for (size_t i = 1; i < sorted.size(); ++i) rest += sorted[i];
  if (rest <= d) {
    std::vector<int64_t> unanimous(sorted.size(), 0);
    unanimous[0] = sorted[0] + rest;
    const double q_unanimous = Q(unanimous);
    return {LocalSensitivity(q_unanimous < q0_ ? q0_ : q_unanimous), true};
  }
  sorted[0] += d;
  DrainSecondHighest(sorted, d);
  const double q_prime = Q(sorted);
  if (q_prime < q0_) return {LocalSensitivity(q0_), true};
  return {LocalSensitivity(q_prime), false};
}

absl::StatusOr<GnmaxSensitivity::AtDistanceResult>
GnmaxSensitivity::AtDistance(const VoteHistogram& h, int64_t d) const {
  if (h.num_classes() != num_classes_) {
    return absl::InvalidArgumentError(
        absl::StrCat("histogram has ", h.num_classes(), " classes, expected ",
                     num_classes_));
  }
  if (d < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("distance must be non-negative, got ", d));
  }
  return AtDistance(h.counts(), d);
}

absl::StatusOr<DistanceSeries> GnmaxSensitivity::Series(
    const VoteHistogram& h) const {
  if (h.num_classes() != num_classes_) {
    return absl::InvalidArgumentError(
        absl::StrCat("histogram has ", h.num_classes(), " classes, expected ",
                     num_classes_));
  }
  DistanceSeries series;
  for (int64_t d = 0; d <= h.num_teachers(); ++d) {
    const AtDistanceResult r = AtDistance(h.counts(), d);
    series.values.push_back(r.value);
    if (r.stop) {
      series.stopped = true;
      break;
    }
  }
  return series;
}

absl::StatusOr<double> GnmaxSensitivity::SmoothSensitivity(
    const VoteHistogram& h, double beta) const {
  if (!(beta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be positive, got ", beta));
  }
  absl::StatusOr<DistanceSeries> series = Series(h);
  if (!series.ok()) return series.status();
  const DistanceSeries one[] = {*std::move(series)};
  return SumSmoothSensitivity(one, beta);
}

ConditionReport GnmaxSensitivity::CheckConditions() const {
  ConditionReport report;
  report.monotone_cost_min_diff = std::numeric_limits<double>::infinity();
  report.monotone_delta_min_diff = std::numeric_limits<double>::infinity();

  auto scan = [](double hi, auto&& f, double& min_diff, double& argmin) {
    double prev = f(0.0);
    for (int k = 1; k <= kConditionGridPoints; ++k) {
      const double q = hi * k / kConditionGridPoints;
      const double value = f(q);
      if (value - prev < min_diff) {
        min_diff = value - prev;
        argmin = q;
      }
      prev = value;
    }
    return min_diff >= kConditionTolerance;
  };

  report.monotone_cost =
      scan(q0_, [&](double q) { return RdpCost(q); },
           report.monotone_cost_min_diff, report.monotone_cost_argmin_q);
  report.monotone_delta = scan(
      q1_,
      [&](double q) {
        return RdpCost(NeighborQUpperBound(q, sigma_, num_classes_)) -
               RdpCost(q);
      },
      report.monotone_delta_min_diff, report.monotone_delta_argmin_q);

  const double plateau = GaussianRdpBound(order_, sigma_);
  report.constant_above_q0 = true;
  for (int k = 1; k <= kConditionGridPoints; ++k) {
    const double q = q0_ + (1.0 - q0_) * k / kConditionGridPoints;
    if (q > q0_ && RdpCost(q) != plateau) report.constant_above_q0 = false;
  }
  report.upper_bound_below_one =
      NeighborQUpperBound(q0_, sigma_, num_classes_) < 1.0;
  return report;
}

bool GnmaxSensitivity::GuardHolds(int64_t num_teachers) const {
  if (!(q0_ > 0.0)) return false;
  std::vector<int64_t> unanimous(num_classes_, 0);
  unanimous[0] = num_teachers;
  return ComputeQ(std::span<const int64_t>(unanimous), sigma_).log_q <=
         std::log(q0_);
}

double SumSmoothSensitivity(std::span<const DistanceSeries> series,
                            double beta) {
  size_t horizon = 0;
  for (const DistanceSeries& s : series) {
    horizon = std::max(horizon, s.values.size());
  }
  double best = 0.0;
  for (size_t d = 0; d < horizon; ++d) {
    double total = 0.0;
    for (const DistanceSeries& s : series) total += s.At(d);
    best = std::max(best, std::exp(-beta * static_cast<double>(d)) * total);
  }
  return best;
}

absl::StatusOr<double> GnssRdpCost(double order, double beta,
                                   double sigma_ss) {
  if (!(beta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be positive, got ", beta));
  }
  if (!(sigma_ss > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma_ss must be positive, got ", sigma_ss));
  }
  if (!(order > 1.0 && order < 1.0 / (2.0 * beta))) {
    return absl::InvalidArgumentError(absl::StrCat(
        "GNSS needs 1 < order < 1/(2 beta) = ", 1.0 / (2.0 * beta), ", got ",
        order));
  }
  return order * std::exp(2.0 * beta) / (sigma_ss * sigma_ss) +
         (beta * order - 0.5 * std::log1p(-2.0 * order * beta)) /
             (order - 1.0);
}

absl::Status GnssParams::Validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return GnssRdpCost(order, beta, sigma_ss).status();
}

absl::StatusOr<SanitizedCost> GnssRelease(double value, double ss,
                                          const GnssParams& params,
                                          RandomSource& rng) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (!(ss >= 0.0 && std::isfinite(ss))) {
    return absl::InvalidArgumentError(
        absl::StrCat("smooth sensitivity must be non-negative, got ", ss));
  }
  const double gnss = *GnssRdpCost(params.order, params.beta, params.sigma_ss);
  const double delta_term = -std::log(params.delta) / (params.order - 1.0);
  const double noise = rng.StandardNormal();
  return SanitizedCost{.noised_value = value + ss * params.sigma_ss * noise,
                       .gnss_rdp = gnss,
                       .delta_term = delta_term,
                       .fixed_surcharge = gnss + delta_term,
                       .beta = params.beta,
                       .sigma_ss = params.sigma_ss};
}

}  // namespace pate
