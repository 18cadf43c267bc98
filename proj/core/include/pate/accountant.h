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

// Renyi differential privacy accounting for the GNMax family.
//
// Each answered query is charged the smaller of a data-dependent bound, which
// shrinks with q (an upper bound on the probability that the mechanism does
// not return the plurality class), and the data-independent Gaussian bound
// order / sigma^2. Costs compose by summation per Renyi order and convert to
// (epsilon, delta)-DP by minimizing over the tracked orders.

#ifndef PATE_ACCOUNTANT_H_
#define PATE_ACCOUNTANT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pate/histogram.h"
#include "pate/mechanisms.h"

namespace pate {

// Upper bound on the probability of not returning the plurality class, kept
// both clamped to [0, 1] and in log space. log_q stays finite where q
// underflows to 0.
struct QBound {
  double q;
  double log_q;
};

// Gaussian union bound: min{ 1/2 sum_{i != i*} erfc((n_{i*} - n_i) / 2 sigma),
// 1 }, with i* the (lowest-index) plurality class.
QBound ComputeQ(const VoteHistogram& h, double sigma);
QBound ComputeQ(std::span<const int64_t> counts, double sigma);
QBound ComputeQ(std::span<const double> scores, double sigma);

// Laplace analogue for LNMax with noise Lap(1/gamma):
//   sum_{i != i*} (2 + gamma d_i) / (4 exp(gamma d_i)),  d_i = n_{i*} - n_i.
// This bound comes from the earlier LNMax analysis, not from the Gaussian
// machinery here; reports flag it as an external formula.
QBound ComputeQLaplace(const VoteHistogram& h, double gamma);

// order / sigma^2.
double GaussianRdpBound(double order, double sigma);

// order / (2 sigma1^2): the clean plurality moves by at most one when a
// single teacher changes its vote.
double ThresholdCheckRdp(double order, double sigma1);

// RDP of order `order` satisfied by any eps0-DP mechanism:
// min(eps0, order * eps0^2 / 2).
double PureDpRdpBound(double order, double eps0);

struct RdpValue {
  double epsilon;
  bool data_dependent;  // True when the data-dependent branch was used.
};

// Data-dependent RDP of GNMax for an upper bound q = exp(log_q), with the
// higher orders mu2 = sigma sqrt(log 1/q), mu1 = mu2 + 1:
//   1/(order-1) log((1-q) A^(order-1) + q B^(order-1)),
//   A = (1-q) / (1 - (q e^{eps2})^{(mu2-1)/mu2}),  B = e^{eps1} / q^{1/(mu1-1)},
// eps_i = mu_i / sigma^2. The data-dependent branch applies only when q < 1,
// mu2 > 1, order <= mu1 and q <= e^{(mu2-1) eps2} / (mu1/(mu1-1) *
// mu2/(mu2-1))^mu2; otherwise, or when it is not smaller, the result is the
// data-independent order / sigma^2. Evaluated entirely in log space.
RdpValue DataDependentRdpGaussian(double log_q, double order, double sigma);

// Data-dependent RDP of an eps0-DP mechanism (the mu -> infinity limit):
// A = (1-q) / (1 - q e^{eps0}), B = e^{eps0}, applicable when
// q < 1 / (1 + e^{eps0}). Capped by PureDpRdpBound.
RdpValue DataDependentRdpPure(double q, double order, double eps0);

// Largest q in (0, 0.5] such that the data-dependent GNMax bound applies and
// does not exceed order / sigma^2 for every q' <= q. Located by a log-space
// scan followed by bisection to 1e-12 (relative for q < 1). Returns 0 when no q
// qualifies, which disables the data-dependent analysis for (sigma, order).
double CriticalQ0(double sigma, double order);

// Immutable, shareable list of Renyi orders (all finite and > 1).
class OrderGrid {
 public:
  static absl::StatusOr<OrderGrid> Create(std::vector<double> orders);

  // Integers 2..256 plus 1.5 and 1.75.
  static OrderGrid Default();

  std::span<const double> values() const { return *orders_; }
  size_t size() const { return orders_->size(); }
  double operator[](size_t i) const { return (*orders_)[i]; }

  // Index of `order` in the grid, if present.
  std::optional<size_t> IndexOf(double order) const;

  friend bool operator==(const OrderGrid& a, const OrderGrid& b) {
    return a.orders_ == b.orders_ || *a.orders_ == *b.orders_;
  }

 private:
  explicit OrderGrid(std::shared_ptr<const std::vector<double>> orders)
      : orders_(std::move(orders)) {}

  std::shared_ptr<const std::vector<double>> orders_;
};

// Per-query RDP cost at every order of a grid.
struct QueryCost {
  OrderGrid orders;
  std::vector<double> epsilon;
  std::vector<bool> data_dependent;
  // q of the answering GNMax/LNMax step.
  double q = 0.0;
  double log_q = 0.0;
  // Probability (or realized indicator) that the answering step ran.
  double answer_weight = 1.0;
};

// Cumulative RDP per order. Additive under Add/Merge.
class RdpCurve {
 public:
  explicit RdpCurve(OrderGrid orders);

  absl::Status Add(const QueryCost& cost);
  absl::Status Merge(const RdpCurve& other);

  const OrderGrid& orders() const { return orders_; }
  std::span<const double> epsilon() const { return epsilon_; }
  int64_t num_queries() const { return num_queries_; }
  std::optional<double> EpsilonAt(double order) const;

 private:
  OrderGrid orders_;
  std::vector<double> epsilon_;
  int64_t num_queries_ = 0;
};

absl::StatusOr<RdpCurve> Compose(std::span<const QueryCost> costs,
                                 const OrderGrid& orders);

struct DpGuarantee {
  double epsilon;
  double delta;
  double order;  // Order achieving the minimum.
};

// epsilon = min over orders of eps(order) + log(1/delta) / (order - 1). A
// curve with no queries maps to epsilon = 0 at the largest tracked order.
absl::StatusOr<DpGuarantee> ToDp(const RdpCurve& curve, double delta);

struct AnalysisConfig {
  Mechanism mechanism = Mechanism::kGnMax;
  double sigma = 0.0;  // GNMax.
  double gamma = 0.0;  // LNMax, noise Lap(1/gamma).
  double threshold = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  OrderGrid orders = OrderGrid::Default();
  double delta = 1e-5;

  absl::Status Validate() const;
  // Noise of the answering step: sigma for GNMax, sigma2 otherwise.
  double AnswerSigma() const;
};

struct AnalysisInputs {
  std::vector<VoteHistogram> votes;
  // Interactive runs only: one distribution per query.
  std::vector<std::vector<double>> student_probs;
  // Optional realized answer indicators (e.g. from an aggregation run).
  // Empty means the threshold step is accounted in expectation.
  std::vector<bool> answered;
};

struct RunReport {
  std::vector<QueryCost> per_query;
  RdpCurve curve;
  DpGuarantee dp;
  double expected_answered = 0.0;
  bool external_formula = false;  // LNMax q bound from the earlier analysis.
};

// Noise-free accounting of a run. For threshold mechanisms every query pays
// ThresholdCheckRdp(sigma1) and the answering step pays its data-dependent
// cost weighted by the probability of passing the noisy threshold (or by the
// realized indicator, when given). Interactive runs threshold on
// max_j {n_j - M p_j}; the reinforcement branch reads only public student
// predictions and is charged nothing extra.
absl::StatusOr<RunReport> AnalyzeRun(const AnalysisInputs& inputs,
                                     const AnalysisConfig& config);

// Probability that the noisy threshold check passes:
// Pr[statistic + N(0, sigma1^2) >= threshold].
double PassProbability(double statistic, double threshold, double sigma1);

}  // namespace pate

#endif  // PATE_ACCOUNTANT_H_
