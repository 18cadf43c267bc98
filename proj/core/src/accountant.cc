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

#include "pate/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "pate/special_functions.h"

namespace pate {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bisection on q stops once the bracket is this narrow, relative to q
// when q < 1.
constexpr double kQ0Tolerance = 1e-12;
// Data-dependent analysis is never used above this q.
constexpr double kMaxQ0 = 0.5;
// Log-space scan for the first q where the data-dependent bound stops
// applying. The lower end is the smallest normal double.
constexpr double kQ0ScanLogMin = -708.0;
constexpr int kQ0ScanSteps = 20000;

bool ValidOrder(double order) { return std::isfinite(order) && order > 1.0; }

template <typename T>
QBound GaussianQ(std::span<const T> counts, double sigma) {
  const auto top = std::max_element(counts.begin(), counts.end());
  const size_t top_index = static_cast<size_t>(top - counts.begin());
  std::vector<double> log_terms;
  log_terms.reserve(counts.size() - 1);
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i == top_index) continue;
    const double gap = static_cast<double>(*top) - static_cast<double>(counts[i]);
    log_terms.push_back(LogErfc(gap / (2.0 * sigma)) - std::numbers::ln2);
  }
  const double log_q = std::min(LogSumExp(log_terms), 0.0);
  return {std::exp(log_q), log_q};
}

bool DataDependentApplies(double log_q, double order, double sigma,
                          double& mu1, double& mu2) {
  if (!(log_q < 0.0)) return false;
  mu2 = sigma * std::sqrt(-log_q);
  mu1 = mu2 + 1.0;
  if (!(mu2 > 1.0) || !(order <= mu1)) return false;
  const double eps2 = mu2 / (sigma * sigma);
  const double log_limit =
      (mu2 - 1.0) * eps2 -
      mu2 * (std::log(mu1 / (mu1 - 1.0)) + std::log(mu2 / (mu2 - 1.0)));
  return log_q <= log_limit;
}

}  // namespace

QBound ComputeQ(std::span<const int64_t> counts, double sigma) {
  return GaussianQ(counts, sigma);
}

QBound ComputeQ(std::span<const double> scores, double sigma) {
  return GaussianQ(scores, sigma);
}

QBound ComputeQ(const VoteHistogram& h, double sigma) {
  return GaussianQ(h.counts(), sigma);
}

QBound ComputeQLaplace(const VoteHistogram& h, double gamma) {
  const int top = h.ArgMax();
  std::vector<double> log_terms;
  for (int i = 0; i < h.num_classes(); ++i) {
    if (i == top) continue;
    const double x = gamma * static_cast<double>(h.count(top) - h.count(i));
    log_terms.push_back(std::log(2.0 + x) - x - std::log(4.0));
  }
  const double log_q = std::min(LogSumExp(log_terms), 0.0);
  return {std::exp(log_q), log_q};
}

double GaussianRdpBound(double order, double sigma) {
  return order / (sigma * sigma);
}

double ThresholdCheckRdp(double order, double sigma1) {
  return order / (2.0 * sigma1 * sigma1);
}

double PureDpRdpBound(double order, double eps0) {
  return std::min(eps0, 0.5 * order * eps0 * eps0);
}

RdpValue DataDependentRdpGaussian(double log_q, double order, double sigma) {
  const double independent = GaussianRdpBound(order, sigma);
  if (log_q == -kInf) return {0.0, true};
  double mu1, mu2;
  if (!DataDependentApplies(log_q, order, sigma, mu1, mu2)) {
    return {independent, false};
  }
  const double variance = sigma * sigma;
  const double eps1 = mu1 / variance;
  const double eps2 = mu2 / variance;
  const double log1mq = Log1mExp(log_q);
  // log A and log B, then the (order - 1)-th powers.
  const double log_a = log1mq - Log1mExp((log_q + eps2) * (1.0 - 1.0 / mu2));
  const double log_b = eps1 - log_q / (mu1 - 1.0);
  const double log_sum = LogAddExp(log1mq + (order - 1.0) * log_a,
                                   log_q + (order - 1.0) * log_b);
  const double dependent = log_sum / (order - 1.0);
  if (dependent <= independent) return {std::max(dependent, 0.0), true};
  return {independent, false};
}

RdpValue DataDependentRdpPure(double q, double order, double eps0) {
  const double independent = PureDpRdpBound(order, eps0);
  if (q <= 0.0) return {0.0, true};
  if (!(q < 1.0 / (1.0 + std::exp(eps0)))) return {independent, false};
  const double log_q = std::log(q);
  const double log1mq = std::log1p(-q);
  const double log_a = log1mq - Log1mExp(log_q + eps0);
  const double log_sum = LogAddExp(log1mq + (order - 1.0) * log_a,
                                   log_q + (order - 1.0) * eps0);
  const double dependent = log_sum / (order - 1.0);
  if (dependent <= independent) return {std::max(dependent, 0.0), true};
  return {independent, false};
}

double CriticalQ0(double sigma, double order) {
  auto qualifies = [&](double log_q) {
    return DataDependentRdpGaussian(log_q, order, sigma).data_dependent;
  };
  if (!qualifies(kQ0ScanLogMin)) return 0.0;
  const double log_max = std::log(kMaxQ0);
  const double step = (log_max - kQ0ScanLogMin) / kQ0ScanSteps;
  double last_good = kQ0ScanLogMin;
  double first_bad = kInf;
  for (int k = 1; k <= kQ0ScanSteps; ++k) {
    const double log_q = k == kQ0ScanSteps ? log_max : kQ0ScanLogMin + k * step;
    if (qualifies(log_q)) {
      last_good = log_q;
    } else {
      first_bad = log_q;
      break;
    }
  }
  if (first_bad == kInf) return kMaxQ0;
  double lo = std::exp(last_good);
  double hi = std::exp(first_bad);
  while (hi - lo > kQ0Tolerance * std::min(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (qualifies(std::log(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

absl::StatusOr<OrderGrid> OrderGrid::Create(std::vector<double> orders) {
  if (orders.empty()) {
    return absl::InvalidArgumentError("order grid is empty");
  }
  for (double order : orders) {
    if (!ValidOrder(order)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Renyi orders must be finite and > 1, got ", order));
    }
  }
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  return OrderGrid(
      std::make_shared<const std::vector<double>>(std::move(orders)));
}

OrderGrid OrderGrid::Default() {
  static const auto* const kDefault = [] {
    std::vector<double> orders = {1.5, 1.75};
    for (int i = 2; i <= 256; ++i) orders.push_back(i);
    return new std::shared_ptr<const std::vector<double>>(
        std::make_shared<const std::vector<double>>(std::move(orders)));
  }();
  return OrderGrid(*kDefault);
}

std::optional<size_t> OrderGrid::IndexOf(double order) const {
  const auto it = std::lower_bound(orders_->begin(), orders_->end(), order);
  if (it == orders_->end() || *it != order) return std::nullopt;
  return static_cast<size_t>(it - orders_->begin());
}

RdpCurve::RdpCurve(OrderGrid orders)
    : orders_(std::move(orders)), epsilon_(orders_.size(), 0.0) {}

absl::Status RdpCurve::Add(const QueryCost& cost) {
  if (!(cost.orders == orders_) || cost.epsilon.size() != orders_.size()) {
    return absl::InvalidArgumentError(
        "query cost is tracked on a different order grid");
  }
  for (size_t i = 0; i < epsilon_.size(); ++i) epsilon_[i] += cost.epsilon[i];
  ++num_queries_;
  return absl::OkStatus();
}

absl::Status RdpCurve::Merge(const RdpCurve& other) {
  if (!(other.orders_ == orders_)) {
    return absl::InvalidArgumentError("cannot merge curves on different grids");
  }
  for (size_t i = 0; i < epsilon_.size(); ++i) epsilon_[i] += other.epsilon_[i];
  num_queries_ += other.num_queries_;
  return absl::OkStatus();
}

std::optional<double> RdpCurve::EpsilonAt(double order) const {
  const std::optional<size_t> index = orders_.IndexOf(order);
  if (!index) return std::nullopt;
  return epsilon_[*index];
}

absl::StatusOr<RdpCurve> Compose(std::span<const QueryCost> costs,
                                 const OrderGrid& orders) {
  RdpCurve curve(orders);
  for (const QueryCost& cost : costs) {
    if (absl::Status s = curve.Add(cost); !s.ok()) return s;
  }
  return curve;
}

absl::StatusOr<DpGuarantee> ToDp(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  const std::span<const double> orders = curve.orders().values();
  if (curve.num_queries() == 0) {
    return DpGuarantee{0.0, delta, orders.back()};
  }
  const double log_inv_delta = -std::log(delta);
  DpGuarantee best{kInf, delta, orders.front()};
  for (size_t i = 0; i < orders.size(); ++i) {
    const double eps = curve.epsilon()[i] + log_inv_delta / (orders[i] - 1.0);
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.order = orders[i];
    }
  }
  return best;
}

double PassProbability(double statistic, double threshold, double sigma1) {
  return NormalSf((threshold - statistic) / sigma1);
}

absl::Status AnalysisConfig::Validate() const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  switch (mechanism) {
    case Mechanism::kGnMax:
      if (!positive(sigma)) {
        return absl::InvalidArgumentError("gnmax requires sigma > 0");
      }
      break;
    case Mechanism::kLnMax:
      if (!positive(gamma)) {
        return absl::InvalidArgumentError("lnmax requires gamma > 0");
      }
      break;
    case Mechanism::kConfident:
    case Mechanism::kInteractive:
      if (!positive(sigma1) || !positive(sigma2)) {
        return absl::InvalidArgumentError(
            "threshold mechanisms require sigma1 > 0 and sigma2 > 0");
      }
      if (!positive(threshold)) {
        return absl::InvalidArgumentError(
            "threshold mechanisms require threshold > 0");
      }
      break;
  }
  return absl::OkStatus();
}

double AnalysisConfig::AnswerSigma() const {
  return mechanism == Mechanism::kGnMax ? sigma : sigma2;
}

absl::StatusOr<RunReport> AnalyzeRun(const AnalysisInputs& inputs,
                                     const AnalysisConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const std::vector<VoteHistogram>& votes = inputs.votes;
  for (size_t k = 1; k < votes.size(); ++k) {
    if (votes[k].num_classes() != votes[0].num_classes()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "query ", k, " has ", votes[k].num_classes(), " classes, query 0 has ",
          votes[0].num_classes()));
    }
  }
  const bool interactive = config.mechanism == Mechanism::kInteractive;
  if (interactive && inputs.student_probs.size() != votes.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("interactive analysis needs student probabilities for "
                     "every query: got ",
                     inputs.student_probs.size(), " for ", votes.size()));
  }
  if (!inputs.answered.empty() && inputs.answered.size() != votes.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", inputs.answered.size(),
                     " realized outcomes for ", votes.size(), " queries"));
  }

  const OrderGrid& orders = config.orders;
  const bool thresholded = config.mechanism == Mechanism::kConfident ||
                           config.mechanism == Mechanism::kInteractive;
  RunReport report{.per_query = {},
                   .curve = RdpCurve(orders),
                   .dp = {},
                   .expected_answered = 0.0,
                   .external_formula = config.mechanism == Mechanism::kLnMax};
  report.per_query.reserve(votes.size());

  for (size_t k = 0; k < votes.size(); ++k) {
    const VoteHistogram& h = votes[k];
    QueryCost cost{orders, std::vector<double>(orders.size(), 0.0),
                   std::vector<bool>(orders.size(), false)};
    if (thresholded) {
      double statistic = static_cast<double>(h.MaxCount());
      if (interactive) {
        if (absl::Status s =
                ValidateStudentProbabilities(h, inputs.student_probs[k]);
            !s.ok()) {
          return absl::InvalidArgumentError(
              absl::StrCat("query ", k, ": ", s.message()));
        }
        statistic =
            MaxDisagreement(h, inputs.student_probs[k], h.num_teachers());
      }
      cost.answer_weight =
          inputs.answered.empty()
              ? PassProbability(statistic, config.threshold, config.sigma1)
              : (inputs.answered[k] ? 1.0 : 0.0);
    }

    QBound q;
    if (config.mechanism == Mechanism::kLnMax) {
      q = ComputeQLaplace(h, config.gamma);
    } else {
      q = ComputeQ(h, config.AnswerSigma());
    }
    cost.q = q.q;
    cost.log_q = q.log_q;

    for (size_t i = 0; i < orders.size(); ++i) {
      const double order = orders[i];
      RdpValue answer;
      if (config.mechanism == Mechanism::kLnMax) {
        answer = DataDependentRdpPure(q.q, order, 2.0 * config.gamma);
      } else {
        answer = DataDependentRdpGaussian(q.log_q, order, config.AnswerSigma());
      }
      cost.epsilon[i] = cost.answer_weight * answer.epsilon;
      cost.data_dependent[i] = answer.data_dependent;
      if (thresholded) cost.epsilon[i] += ThresholdCheckRdp(order, config.sigma1);
    }
    report.expected_answered += cost.answer_weight;
    if (absl::Status s = report.curve.Add(cost); !s.ok()) return s;
    report.per_query.push_back(std::move(cost));
  }

  absl::StatusOr<DpGuarantee> dp = ToDp(report.curve, config.delta);
  if (!dp.ok()) return dp.status();
  report.dp = *dp;
  return report;
}

}  // namespace pate
