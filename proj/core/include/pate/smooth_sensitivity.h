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

// Smooth sensitivity of the data-dependent GNMax privacy cost, and the
// Gaussian noise with smooth sensitivity (GNSS) mechanism used to publish it.

#ifndef PATE_SMOOTH_SENSITIVITY_H_
#define PATE_SMOOTH_SENSITIVITY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pate/histogram.h"
#include "pate/random_source.h"

namespace pate {

// Bounds on q at any neighbor of a histogram with value q, m classes:
//   B_U(q) = min{(m-1)/2 erfc(erfcinv(2q/(m-1)) - 1/sigma), 1}
//   B_L(q) = (m-1)/2 erfc(erfcinv(2q/(m-1)) + 1/sigma)
double NeighborQUpperBound(double q, double sigma, int num_classes);
double NeighborQLowerBound(double q, double sigma, int num_classes);

// Local sensitivity bounds at distances 0..stop. Past the last entry the
// series is constant.
struct DistanceSeries {
  std::vector<double> values;
  bool stopped = false;

  double At(int64_t d) const;
};

struct ConditionReport {
  bool monotone_cost = false;         // M non-decreasing on [0, q0].
  double monotone_cost_min_diff = 0;  // Smallest forward difference seen.
  double monotone_cost_argmin_q = 0;
  bool constant_above_q0 = false;
  bool monotone_delta = false;  // M(B_U(q)) - M(q) non-decreasing on [0, q1].
  double monotone_delta_min_diff = 0;
  double monotone_delta_argmin_q = 0;
  bool upper_bound_below_one = false;  // B_U(q0) < 1.

  bool ok() const {
    return monotone_cost && constant_above_q0 && monotone_delta &&
           upper_bound_below_one;
  }
};

// Smooth sensitivity machinery for GNMax with noise sigma, tracked at one
// Renyi order, on histograms with a fixed number of classes.
class GnmaxSensitivity {
 public:
  static absl::StatusOr<GnmaxSensitivity> Create(double sigma, double order,
                                                 int num_classes);

  double sigma() const { return sigma_; }
  double order() const { return order_; }
  int num_classes() const { return num_classes_; }
  double q0() const { return q0_; }
  double q1() const { return q1_; }

  // Data-dependent cost for q <= q0, order / sigma^2 above.
  double RdpCost(double q) const;

  // Upper bound on the local sensitivity of RdpCost at a histogram with the
  // given q. Constant on [q1, q0].
  double LocalSensitivity(double q) const;

  // Largest local sensitivity over histograms within distance d of `counts`,
  // and whether larger distances can no longer change it.
  struct AtDistanceResult {
    double value;
    bool stop;
  };
  AtDistanceResult AtDistance(std::span<const int64_t> counts,
                              int64_t d) const;
  absl::StatusOr<AtDistanceResult> AtDistance(const VoteHistogram& h,
                                              int64_t d) const;

  // AtDistance for d = 0, 1, ... until it stops, capped at d = n.
  absl::StatusOr<DistanceSeries> Series(const VoteHistogram& h) const;

  // max_d e^{-beta d} AtDistance(h, d).
  absl::StatusOr<double> SmoothSensitivity(const VoteHistogram& h,
                                           double beta) const;

  // Numeric grid check (10^4 points) of the monotonicity conditions the
  // algorithm relies on.
  ConditionReport CheckConditions() const;

  // q0 must be at least q([n, 0, ..., 0]); otherwise the data-dependent
  // analysis is not valid for every histogram with n teachers.
  bool GuardHolds(int64_t num_teachers) const;

 private:
  GnmaxSensitivity(double sigma, double order, int num_classes, double q0,
                   double q1)
      : sigma_(sigma),
        order_(order),
        num_classes_(num_classes),
        q0_(q0),
        q1_(q1) {}

  double Q(std::span<const int64_t> counts) const;

  double sigma_;
  double order_;
  int num_classes_;
  double q0_;
  double q1_;
};

// max_d e^{-beta d} sum_i series_i(d), each series held at its last value.
double SumSmoothSensitivity(std::span<const DistanceSeries> series,
                            double beta);

// RDP of order `order` of the (beta, sigma_ss)-GNSS mechanism:
//   order e^{2 beta} / sigma_ss^2
//     + (beta order - 0.5 ln(1 - 2 order beta)) / (order - 1),
// defined for 1 < order < 1 / (2 beta).
absl::StatusOr<double> GnssRdpCost(double order, double beta, double sigma_ss);

struct GnssParams {
  double order = 0.0;
  double beta = 0.0;
  double sigma_ss = 0.0;
  double delta = 1e-5;

  absl::Status Validate() const;
};

struct SanitizedCost {
  double noised_value;
  double gnss_rdp;
  double delta_term;       // log(1/delta) / (order - 1).
  double fixed_surcharge;  // gnss_rdp + delta_term.
  double beta;
  double sigma_ss;

  // Published (epsilon, delta) guarantee.
  double epsilon() const { return noised_value + fixed_surcharge; }
};

// value + ss * sigma_ss * N(0, 1). Draws one normal, even when ss = 0.
absl::StatusOr<SanitizedCost> GnssRelease(double value, double ss,
                                          const GnssParams& params,
                                          RandomSource& rng);

}  // namespace pate

#endif  // PATE_SMOOTH_SENSITIVITY_H_
