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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "pate/smooth_sensitivity.h"

namespace pate {
namespace {

using ::pate::testing::Hp;
using ::pate::testing::HpDataDependentGaussian;
using ::pate::testing::HpDataDependentPure;
using ::pate::testing::HpErfc;
using ::pate::testing::HpQ;

VoteHistogram H(std::vector<int64_t> counts) {
  return *VoteHistogram::Create(std::move(counts));
}

QueryCost CostAt(const OrderGrid& grid, std::vector<double> eps) {
  QueryCost c{.orders = grid, .epsilon = std::move(eps)};
  c.data_dependent.assign(c.epsilon.size(), false);
  return c;
}

TEST(GaussianRdpBoundTest, Examples) {
  EXPECT_NEAR(GaussianRdpBound(14, 150), 14.0 / 22500, 1e-18);
  EXPECT_DOUBLE_EQ(GaussianRdpBound(1, 1), 1.0);
  EXPECT_NEAR(GaussianRdpBound(2, std::sqrt(2.0)), 1.0, 1e-15);
}

TEST(ThresholdCheckRdpTest, Examples) {
  EXPECT_NEAR(ThresholdCheckRdp(20, 1500), 20.0 / (2 * 1500.0 * 1500.0), 1e-20);
  EXPECT_NEAR(ThresholdCheckRdp(1, 1 / std::sqrt(2.0)), 1.0, 1e-15);
  EXPECT_EQ(ThresholdCheckRdp(5, std::numeric_limits<double>::infinity()), 0.0);
}

TEST(ComputeQTest, TwoClassGap) {
  const QBound q = ComputeQ(H({400, 0}), 100);
  const double expected = static_cast<double>(HpErfc(Hp(2)) / 2);
  EXPECT_NEAR(q.q, expected, 1e-15);
  EXPECT_NEAR(q.log_q, std::log(expected), 1e-13);
}

TEST(ComputeQTest, TieIsHalf) {
  EXPECT_DOUBLE_EQ(ComputeQ(H({7, 7}), 3).q, 0.5);
  EXPECT_DOUBLE_EQ(ComputeQ(H({7, 7}), 300).q, 0.5);
}

TEST(ComputeQTest, SumsOverManyClasses) {
  std::vector<int64_t> counts(151, 0);
  counts[0] = 400;
  const double expected = static_cast<double>(75 * HpErfc(Hp(2)));
  EXPECT_NEAR(expected, 0.351, 1e-3);
  EXPECT_NEAR(ComputeQ(H(counts), 100).q, expected, 1e-14);
}

TEST(ComputeQTest, ClampsAtOneButKeepsLogFinite) {
  std::vector<int64_t> counts(10, 1);
  const QBound q = ComputeQ(H(counts), 50);
  EXPECT_EQ(q.q, 1.0);
  EXPECT_EQ(q.log_q, 0.0);
}

TEST(ComputeQTest, LogSpaceSurvivesUnderflow) {
  const QBound q = ComputeQ(H({5000, 0, 0}), 10);
  EXPECT_EQ(q.q, 0.0);
  const double expected = static_cast<double>(log(HpQ({5000, 0, 0}, 10)));
  EXPECT_NEAR(q.log_q, expected, 1e-9 * std::abs(expected));
}

TEST(ComputeQTest, MatchesOracleOnRandomHistograms) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 9;
    std::vector<int64_t> c(m);
    for (auto& x : c) x = std::uniform_int_distribution<int>(0, 300)(gen);
    c[0] += 1;
    const double sigma = 5 + trial % 40;
    const QBound q = ComputeQ(H(c), sigma);
    const Hp hp = HpQ(c, sigma);
    const double expected = hp >= 1 ? 0.0 : static_cast<double>(log(hp));
    EXPECT_NEAR(q.log_q, expected, 1e-11 * std::max(1.0, std::abs(expected)));
  }
}

TEST(ComputeQLaplaceTest, TieAndLargeGap) {
  EXPECT_NEAR(ComputeQLaplace(H({5, 5}), 1.0).q, 0.5, 1e-12);
  EXPECT_LT(ComputeQLaplace(H({1000, 0}), 1.0).q, 1e-100);
}

TEST(DataDependentRdpGaussianTest, FallbackAtQOne) {
  const RdpValue v = DataDependentRdpGaussian(0.0, 20, 100);
  EXPECT_DOUBLE_EQ(v.epsilon, 20.0 / 10000);
  EXPECT_FALSE(v.data_dependent);
}

TEST(DataDependentRdpGaussianTest, VanishesAsQGoesToZero) {
  const RdpValue v = DataDependentRdpGaussian(std::log(1e-300), 20, 100);
  EXPECT_TRUE(v.data_dependent);
  EXPECT_LT(v.epsilon, 1e-6);
  EXPECT_EQ(DataDependentRdpGaussian(-std::numeric_limits<double>::infinity(),
                                     20, 100)
                .epsilon,
            0.0);
}

TEST(DataDependentRdpGaussianTest, MatchesHighPrecisionOracle) {
  for (double sigma : {10.0, 40.0, 100.0, 150.0}) {
    for (double order : {1.5, 2.0, 8.0, 20.0, 50.0}) {
      for (double log_q : {-600.0, -100.0, -30.0, -10.0, -5.0, -2.0, -0.5}) {
        const double got = DataDependentRdpGaussian(log_q, order, sigma).epsilon;
        const double expected =
            HpDataDependentGaussian(exp(Hp(log_q)), order, sigma);
        EXPECT_NEAR(got, expected, 1e-12 + 1e-9 * expected)
            << "sigma=" << sigma << " order=" << order << " log_q=" << log_q;
      }
    }
  }
}

// The asymptotic bound for a gap of 8 sigma at order gap / 4, using the
// Gaussian tail bound exp(-gap^2 / (4 sigma^2)) as q, lies within a factor of
// two of exp(-2 order / sigma^2) / order. The erfc-based q is tighter still.
TEST(DataDependentRdpGaussianTest, LargeGapAsymptotic) {
  for (double sigma : {5.0, 10.0, 25.0, 50.0}) {
    const double gap = 8 * sigma;
    const double order = gap / 4;
    const double asymptotic = std::exp(-2 * order / (sigma * sigma)) / order;
    const double log_tail = -gap * gap / (4 * sigma * sigma);
    const double from_tail =
        DataDependentRdpGaussian(log_tail, order, sigma).epsilon;
    EXPECT_LE(from_tail, 2 * asymptotic) << sigma;
    EXPECT_GE(from_tail, 0.5 * asymptotic) << sigma;
    const int64_t n1 = static_cast<int64_t>(gap) * 3;
    const VoteHistogram h =
        H({n1, n1 - static_cast<int64_t>(gap), n1 - 2 * static_cast<int64_t>(gap)});
    const double exact =
        DataDependentRdpGaussian(ComputeQ(h, sigma).log_q, order, sigma).epsilon;
    EXPECT_LE(exact, 2 * asymptotic) << sigma;
  }
}

TEST(DataDependentRdpPureTest, Examples) {
  EXPECT_EQ(DataDependentRdpPure(0.0, 8, 0.2).epsilon, 0.0);
  const RdpValue fallback = DataDependentRdpPure(0.9, 8, 0.2);
  EXPECT_FALSE(fallback.data_dependent);
  EXPECT_DOUBLE_EQ(fallback.epsilon, PureDpRdpBound(8, 0.2));
  const RdpValue v = DataDependentRdpPure(0.01, 8, 0.2);
  EXPECT_TRUE(v.data_dependent);
  EXPECT_NEAR(v.epsilon, HpDataDependentPure(Hp("0.01"), 8, 0.2), 1e-12);
}

TEST(PureDpRdpBoundTest, NeverExceedsEps0) {
  EXPECT_DOUBLE_EQ(PureDpRdpBound(8, 0.2), 0.16);
  EXPECT_DOUBLE_EQ(PureDpRdpBound(100, 0.2), 0.2);
}

TEST(CriticalQ0Test, DefiningProperty) {
  for (double sigma : {20.0, 40.0, 100.0, 150.0}) {
    for (double order : {2.0, 8.0, 20.0, 50.0}) {
      const double q0 = CriticalQ0(sigma, order);
      ASSERT_GT(q0, 0.0);
      ASSERT_LE(q0, 0.5);
      const double cap = GaussianRdpBound(order, sigma);
      EXPECT_LE(DataDependentRdpGaussian(std::log(q0 * (1 - 1e-6)), order, sigma)
                    .epsilon,
                cap);
      if (q0 < 0.5) {
        const RdpValue above = DataDependentRdpGaussian(
            std::log(std::min(0.5, q0 * (1 + 1e-6))), order, sigma);
        EXPECT_FALSE(above.data_dependent) << sigma << " " << order;
      }
    }
  }
}

TEST(CriticalQ0Test, RegressionValue) {
  EXPECT_NEAR(CriticalQ0(100, 20), 0.02051687317, 1e-10);
}

TEST(CriticalQ0Test, ZeroMeansNoDataDependentRegion) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (double order : {2.0, 50.0, 200.0}) {
      if (CriticalQ0(sigma, order) != 0.0) continue;
      for (double log_q = -700; log_q < std::log(0.5); log_q += 1.0) {
        EXPECT_FALSE(
            DataDependentRdpGaussian(log_q, order, sigma).data_dependent);
      }
    }
  }
}

TEST(DataDependentRdpGaussianTest, CappedAndMonotoneBelowQ0) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const double sigma = 5 + 195 * u(gen);
    const double order = 1.5 + 98 * u(gen);
    const double q0 = CriticalQ0(sigma, order);
    const double cap = GaussianRdpBound(order, sigma);
    double prev = 0;
    for (int i = 0; i <= 1000; ++i) {
      const double q = q0 * i / 1000.0;
      const double v =
          DataDependentRdpGaussian(q > 0 ? std::log(q) : -INFINITY, order, sigma)
              .epsilon;
      EXPECT_LE(v, cap);
      EXPECT_GE(v - prev, -1e-12);
      prev = v;
    }
  }
}

TEST(OrderGridTest, ValidatesAndIndexes) {
  EXPECT_FALSE(OrderGrid::Create({}).ok());
  EXPECT_FALSE(OrderGrid::Create({1.0}).ok());
  EXPECT_FALSE(OrderGrid::Create({2.0, std::nan("")}).ok());
  const OrderGrid d = OrderGrid::Default();
  EXPECT_EQ(d.size(), 257u);
  EXPECT_TRUE(d.IndexOf(1.5).has_value());
  EXPECT_TRUE(d.IndexOf(256).has_value());
  EXPECT_FALSE(d.IndexOf(2.5).has_value());
}

TEST(ComposeTest, SumsPerOrder) {
  const OrderGrid grid = *OrderGrid::Create({8});
  const std::vector<QueryCost> costs = {CostAt(grid, {0.1}), CostAt(grid, {0.2}),
                                        CostAt(grid, {0.3})};
  const RdpCurve curve = *Compose(costs, grid);
  EXPECT_NEAR(*curve.EpsilonAt(8), 0.6, 1e-15);
  EXPECT_EQ(curve.num_queries(), 3);
}

TEST(ComposeTest, EmptyIsZero) {
  const OrderGrid grid = *OrderGrid::Create({2, 4});
  const RdpCurve curve = *Compose({}, grid);
  EXPECT_EQ(curve.epsilon()[0], 0.0);
  EXPECT_EQ(curve.epsilon()[1], 0.0);
}

TEST(ComposeTest, IdenticalGaussianQueries) {
  const OrderGrid grid = OrderGrid::Default();
  std::vector<double> eps;
  for (double order : grid.values()) eps.push_back(GaussianRdpBound(order, 40));
  const std::vector<QueryCost> costs(250, CostAt(grid, eps));
  const RdpCurve curve = *Compose(costs, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(curve.epsilon()[i], 250 * grid[i] / 1600, 1e-12 * grid[i]);
  }
}

TEST(ComposeTest, RejectsMismatchedGrids) {
  const OrderGrid a = *OrderGrid::Create({2, 4});
  const OrderGrid b = *OrderGrid::Create({2, 5});
  const std::vector<QueryCost> costs = {CostAt(b, {1, 1})};
  EXPECT_FALSE(Compose(costs, a).ok());
  RdpCurve x(a), y(b);
  EXPECT_FALSE(x.Merge(y).ok());
}

TEST(ComposeTest, MergeIsCommutativeAndAssociative) {
  const OrderGrid grid = *OrderGrid::Create({2, 3, 10});
  RdpCurve a(grid), b(grid), c(grid);
  ASSERT_TRUE(a.Add(CostAt(grid, {0.5, 0.25, 0.125})).ok());
  ASSERT_TRUE(b.Add(CostAt(grid, {1, 2, 3})).ok());
  ASSERT_TRUE(c.Add(CostAt(grid, {0.75, 0.5, 4})).ok());
  RdpCurve ab_c = a;
  ASSERT_TRUE(ab_c.Merge(b).ok());
  ASSERT_TRUE(ab_c.Merge(c).ok());
  RdpCurve bc = b;
  ASSERT_TRUE(bc.Merge(c).ok());
  RdpCurve a_bc = bc;
  ASSERT_TRUE(a_bc.Merge(a).ok());
  for (size_t i = 0; i < grid.size(); ++i) {
    EXPECT_DOUBLE_EQ(ab_c.epsilon()[i], a_bc.epsilon()[i]);
  }
  EXPECT_EQ(ab_c.num_queries(), 3);
}

TEST(ToDpTest, SingleOrder) {
  const OrderGrid grid = *OrderGrid::Create({2});
  RdpCurve curve(grid);
  ASSERT_TRUE(curve.Add(CostAt(grid, {1.0})).ok());
  const DpGuarantee dp = *ToDp(curve, std::exp(-1.0));
  EXPECT_NEAR(dp.epsilon, 2.0, 1e-15);
  EXPECT_EQ(dp.order, 2.0);
}

TEST(ToDpTest, RejectsBadDelta) {
  RdpCurve curve(OrderGrid::Default());
  EXPECT_FALSE(ToDp(curve, 0.0).ok());
  EXPECT_FALSE(ToDp(curve, 1.0).ok());
  EXPECT_FALSE(ToDp(curve, -0.5).ok());
}

TEST(ToDpTest, DeltaNearOneApproachesMinimum) {
  const OrderGrid grid = *OrderGrid::Create({2, 5, 9});
  RdpCurve curve(grid);
  ASSERT_TRUE(curve.Add(CostAt(grid, {0.3, 0.2, 0.7})).ok());
  EXPECT_NEAR(ToDp(curve, 1 - 1e-12)->epsilon, 0.2, 1e-11);
}

TEST(ToDpTest, NeverExceedsAnySingleOrder) {
  const OrderGrid grid = OrderGrid::Default();
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> eps(grid.size());
  for (auto& e : eps) e = 3 * u(gen);
  RdpCurve curve(grid);
  ASSERT_TRUE(curve.Add(CostAt(grid, eps)).ok());
  const DpGuarantee dp = *ToDp(curve, 1e-5);
  for (size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(dp.epsilon, eps[i] + std::log(1e5) / (grid[i] - 1));
  }
}

TEST(AnalyzeRunTest, EmptyRunCostsNothing) {
  AnalysisConfig config{.mechanism = Mechanism::kGnMax, .sigma = 40};
  const RunReport report = *AnalyzeRun({}, config);
  EXPECT_EQ(report.dp.epsilon, 0.0);
  EXPECT_TRUE(report.per_query.empty());
}

TEST(AnalyzeRunTest, UnanimousVotesBeatDataIndependent) {
  AnalysisInputs inputs;
  for (int i = 0; i < 100; ++i) inputs.votes.push_back(H({5000, 0, 0, 0}));
  AnalysisConfig config{.mechanism = Mechanism::kConfident,
                        .threshold = 3500,
                        .sigma1 = 150,
                        .sigma2 = 50};
  const RunReport report = *AnalyzeRun(inputs, config);
  for (size_t i = 0; i < config.orders.size(); ++i) {
    EXPECT_LT(report.curve.epsilon()[i],
              100 * GaussianRdpBound(config.orders[i], 50));
  }
  EXPECT_NEAR(report.expected_answered, 100, 1e-6);
}

TEST(AnalyzeRunTest, LinearOverConcatenation) {
  std::mt19937_64 gen(9);
  auto random_votes = [&](int k) {
    std::vector<VoteHistogram> v;
    for (int i = 0; i < k; ++i) {
      std::vector<int64_t> c(10, 0);
      for (int t = 0; t < 250; ++t) {
        ++c[std::uniform_int_distribution<int>(0, 3)(gen) == 0
                ? std::uniform_int_distribution<int>(0, 9)(gen)
                : i % 10];
      }
      v.push_back(H(c));
    }
    return v;
  };
  AnalysisInputs first{.votes = random_votes(40)};
  AnalysisInputs second{.votes = random_votes(25)};
  AnalysisInputs both = first;
  both.votes.insert(both.votes.end(), second.votes.begin(), second.votes.end());
  for (Mechanism mech :
       {Mechanism::kGnMax, Mechanism::kConfident, Mechanism::kLnMax}) {
    AnalysisConfig config{.mechanism = mech,
                          .sigma = 30,
                          .gamma = 0.05,
                          .threshold = 180,
                          .sigma1 = 90,
                          .sigma2 = 30};
    const RunReport a = *AnalyzeRun(first, config);
    const RunReport b = *AnalyzeRun(second, config);
    const RunReport ab = *AnalyzeRun(both, config);
    for (size_t i = 0; i < config.orders.size(); ++i) {
      EXPECT_NEAR(ab.curve.epsilon()[i],
                  a.curve.epsilon()[i] + b.curve.epsilon()[i],
                  1e-12 * ab.curve.epsilon()[i] + 1e-300);
    }
  }
}

TEST(AnalyzeRunTest, RealizedOutcomesWeightAnswers) {
  AnalysisInputs inputs{.votes = {H({200, 50}), H({120, 130})},
                        .answered = {true, false}};
  AnalysisConfig config{.mechanism = Mechanism::kConfident,
                        .threshold = 175,
                        .sigma1 = 60,
                        .sigma2 = 20};
  const RunReport report = *AnalyzeRun(inputs, config);
  EXPECT_EQ(report.per_query[0].answer_weight, 1.0);
  EXPECT_EQ(report.per_query[1].answer_weight, 0.0);
  const size_t i = *config.orders.IndexOf(10);
  EXPECT_NEAR(report.per_query[1].epsilon[i], ThresholdCheckRdp(10, 60), 1e-18);
}

TEST(AnalyzeRunTest, ExpectedAnswerWeightIsPassProbability) {
  AnalysisInputs inputs{.votes = {H({200, 50})}};
  AnalysisConfig config{.mechanism = Mechanism::kConfident,
                        .threshold = 175,
                        .sigma1 = 60,
                        .sigma2 = 20};
  const RunReport report = *AnalyzeRun(inputs, config);
  const double expected =
      static_cast<double>(HpErfc(Hp(-25) / (60 * sqrt(Hp(2)))) / 2);
  EXPECT_NEAR(report.per_query[0].answer_weight, expected, 1e-14);
  EXPECT_NEAR(PassProbability(200, 175, 60), expected, 1e-14);
}

TEST(AnalyzeRunTest, InteractiveUsesDisagreement) {
  AnalysisInputs inputs{.votes = {H({60, 40})},
                        .student_probs = {{0.6, 0.4}}};
  AnalysisConfig config{.mechanism = Mechanism::kInteractive,
                        .threshold = 30,
                        .sigma1 = 10,
                        .sigma2 = 5};
  const RunReport report = *AnalyzeRun(inputs, config);
  EXPECT_NEAR(report.per_query[0].answer_weight, PassProbability(0, 30, 10),
              1e-15);
  inputs.student_probs.clear();
  EXPECT_FALSE(AnalyzeRun(inputs, config).ok());
}

TEST(AnalyzeRunTest, RejectsInconsistentClassCounts) {
  AnalysisInputs inputs{.votes = {H({1, 2}), H({1, 2, 3})}};
  AnalysisConfig config{.mechanism = Mechanism::kGnMax, .sigma = 4};
  EXPECT_FALSE(AnalyzeRun(inputs, config).ok());
}

TEST(AnalyzeRunTest, LnMaxFlagsExternalFormula) {
  AnalysisInputs inputs{.votes = {H({90, 10})}};
  AnalysisConfig config{.mechanism = Mechanism::kLnMax, .gamma = 0.05};
  const RunReport report = *AnalyzeRun(inputs, config);
  EXPECT_TRUE(report.external_formula);
  for (size_t i = 0; i < config.orders.size(); ++i) {
    EXPECT_LE(report.per_query[0].epsilon[i],
              PureDpRdpBound(config.orders[i], 0.1) + 1e-15);
  }
}

}  // namespace
}  // namespace pate
