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

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gtest/gtest.h"
#include "oracles.h"

namespace pate {
namespace {

using Kind = AggregationOutcome::Kind;

VoteHistogram H(std::vector<int64_t> counts) {
  return *VoteHistogram::Create(std::move(counts));
}

TEST(MechanismNameTest, RoundTrips) {
  for (Mechanism m : {Mechanism::kLnMax, Mechanism::kGnMax,
                      Mechanism::kConfident, Mechanism::kInteractive}) {
    EXPECT_EQ(ParseMechanism(MechanismName(m)), m);
  }
  EXPECT_FALSE(ParseMechanism("gnmax2").has_value());
}

TEST(GnMaxTest, NegligibleNoise) {
  RandomSource rng(1);
  EXPECT_EQ(*GnMax(H({900, 100}), 1e-9, rng), 0);
  EXPECT_EQ(*GnMax(H({0, 0, 37}), 1e-9, rng), 2);
}

TEST(GnMaxTest, RejectsBadSigma) {
  RandomSource rng(1);
  EXPECT_FALSE(GnMax(H({1, 2}), 0.0, rng).ok());
  EXPECT_FALSE(GnMax(H({1, 2}), -1.0, rng).ok());
  EXPECT_FALSE(LnMax(H({1, 2}), 0.0, rng).ok());
}

TEST(GnMaxTest, DeterministicUnderSeed) {
  const VoteHistogram h = H({30, 28, 29});
  RandomSource a(99), b(99);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(*GnMax(h, 5.0, a), *GnMax(h, 5.0, b));
}

TEST(GnMaxTest, MislabelRateMatchesErfcOracle) {
  const double expected =
      static_cast<double>(testing::HpErfc(testing::Hp(2)) / 2);
  ASSERT_NEAR(expected, 0.00234, 1e-5);
  const VoteHistogram h = H({400, 0});
  RandomSource rng(2024);
  const int trials = 1000000;
  int wrong = 0;
  for (int i = 0; i < trials; ++i) wrong += (*GnMax(h, 100.0, rng) != 0);
  EXPECT_NEAR(static_cast<double>(wrong) / trials, expected, 3e-4);
}

// Pr[Lap_2 - Lap_1 > t] for independent Laplace(0, b), integrated numerically
// as E[Pr[Lap_2 > t + Lap_1]].
double LaplaceDifferenceTail(double t, double b) {
  auto density = [b](double x) { return std::exp(-std::abs(x) / b) / (2 * b); };
  auto sf = [b](double x) {
    return x >= 0 ? 0.5 * std::exp(-x / b) : 1 - 0.5 * std::exp(x / b);
  };
  auto integrand = [&](double x) { return density(x) * sf(t + x); };
  using boost::math::quadrature::gauss_kronrod;
  double total = 0;
  const double knots[] = {-60 * b, -t, 0.0, 60 * b};
  for (int i = 0; i + 1 < 4; ++i) {
    total += gauss_kronrod<double, 61>::integrate(integrand, knots[i],
                                                  knots[i + 1], 15, 1e-14);
  }
  return total;
}

TEST(LnMaxTest, NegligibleNoise) {
  RandomSource rng(3);
  EXPECT_EQ(*LnMax(H({900, 100}), 1e9, rng), 0);
  EXPECT_EQ(*LnMax(H({12, 0, 0, 0}), 1e9, rng), 0);
}

TEST(LnMaxTest, MislabelRateMatchesIntegratedOracle) {
  const double p = LaplaceDifferenceTail(400.0, 100.0);
  ASSERT_GT(p, 0.02);
  ASSERT_LT(p, 0.04);
  const VoteHistogram h = H({400, 0});
  RandomSource rng(77);
  const int trials = 1000000;
  int wrong = 0;
  for (int i = 0; i < trials; ++i) wrong += (*LnMax(h, 0.01, rng) != 0);
  const double se = std::sqrt(p * (1 - p) / trials);
  EXPECT_NEAR(static_cast<double>(wrong) / trials, p, 3 * se);
}

TEST(ConfidentGnMaxTest, Examples) {
  RandomSource rng(4);
  const ConfidentConfig quiet{.threshold = 500, .sigma1 = 1e-9, .sigma2 = 1e-9};
  EXPECT_EQ(*ConfidentGnMax(H({900, 100}), quiet, rng),
            AggregationOutcome::TeacherLabel(0));
  const ConfidentConfig high{.threshold = 800, .sigma1 = 1e-9, .sigma2 = 1e-9};
  EXPECT_EQ(*ConfidentGnMax(H({300, 300, 400}), high, rng),
            AggregationOutcome::NoAnswer());
}

TEST(ConfidentGnMaxTest, RejectsInvalidConfig) {
  RandomSource rng(4);
  EXPECT_FALSE(ConfidentGnMax(H({3, 1}), {.threshold = 0, .sigma1 = 1,
                                          .sigma2 = 1},
                              rng)
                   .ok());
  EXPECT_FALSE(ConfidentGnMax(H({3, 1}), {.threshold = 1, .sigma1 = 0,
                                          .sigma2 = 1},
                              rng)
                   .ok());
}

TEST(ConfidentGnMaxTest, DefaultsFollowEnsembleSize) {
  const ConfidentConfig c = ConfidentConfig::WithDefaults(250, 40);
  EXPECT_DOUBLE_EQ(c.threshold, 175);
  EXPECT_DOUBLE_EQ(c.sigma1, 120);
  EXPECT_DOUBLE_EQ(c.sigma2, 40);
}

TEST(ConfidentGnMaxTest, PassRateAtThresholdIsHalf) {
  std::vector<int64_t> counts(5, 375);
  counts[0] = 3500;
  const VoteHistogram h = H(counts);
  ASSERT_EQ(h.num_teachers(), 5000);
  const ConfidentConfig config{.threshold = 3500, .sigma1 = 1500, .sigma2 = 40};
  RandomSource rng(5);
  const int trials = 100000;
  int passed = 0;
  for (int i = 0; i < trials; ++i) {
    passed += ConfidentGnMax(h, config, rng)->answered();
  }
  EXPECT_NEAR(static_cast<double>(passed) / trials, 0.5, 0.01);
}

// Conditioned on passing, answers follow the GNMax distribution.
TEST(ConfidentGnMaxTest, ConditionalAnswersMatchGnMax) {
  const VoteHistogram h = H({50, 45, 40});
  const ConfidentConfig config{.threshold = 50, .sigma1 = 10, .sigma2 = 10};
  RandomSource rng_conf(6), rng_plain(7);
  const int trials = 100000;
  std::vector<double> conf(3, 0), plain(3, 0);
  for (int i = 0; i < trials; ++i) {
    const AggregationOutcome out = *ConfidentGnMax(h, config, rng_conf);
    if (out.answered()) conf[out.label] += 1;
    plain[*GnMax(h, 10.0, rng_plain)] += 1;
  }
  double n1 = 0, n2 = 0;
  for (int i = 0; i < 3; ++i) {
    n1 += conf[i];
    n2 += plain[i];
  }
  ASSERT_GT(n1, 0.3 * trials);
  // Two-sample chi-squared statistic on a 2 x 3 table.
  double stat = 0;
  for (int i = 0; i < 3; ++i) {
    const double total = conf[i] + plain[i];
    const double e1 = total * n1 / (n1 + n2);
    const double e2 = total * n2 / (n1 + n2);
    stat += (conf[i] - e1) * (conf[i] - e1) / e1 +
            (plain[i] - e2) * (plain[i] - e2) / e2;
  }
  const boost::math::chi_squared dist(2);
  EXPECT_LT(stat, boost::math::quantile(dist, 0.999));
}

InteractiveConfig Interactive(int64_t n, double threshold, double gamma,
                              double sigma1 = 1e-9) {
  return {.threshold = threshold,
          .gamma = gamma,
          .sigma1 = sigma1,
          .sigma2 = 1e-9,
          .num_teachers = n};
}

TEST(InteractiveGnMaxTest, ConfidentAgreeingStudentIsReinforced) {
  const VoteHistogram h = H({90, 10});
  const std::vector<double> p = {0.9, 0.1};
  RandomSource rng(8);
  EXPECT_EQ(*InteractiveGnMax(h, p, Interactive(100, 5, 0.8), rng),
            AggregationOutcome::ReinforceStudent(0));
}

TEST(InteractiveGnMaxTest, DisagreementGoesToTeachers) {
  const VoteHistogram h = H({100, 0, 0, 0});
  const std::vector<double> p(4, 0.25);
  RandomSource rng(9);
  EXPECT_EQ(*InteractiveGnMax(h, p, Interactive(100, 50, 0.2), rng),
            AggregationOutcome::TeacherLabel(0));
}

TEST(InteractiveGnMaxTest, UnconfidentAgreeingStudentGetsNothing) {
  const VoteHistogram h = H({50, 50});
  const std::vector<double> p = {0.5, 0.5};
  RandomSource rng(10);
  EXPECT_EQ(*InteractiveGnMax(h, p, Interactive(100, 5, 0.99), rng),
            AggregationOutcome::NoAnswer());
}

TEST(InteractiveGnMaxTest, RejectsBadInputs) {
  const VoteHistogram h = H({50, 50});
  RandomSource rng(11);
  const std::vector<double> unnormalized = {0.5, 0.6};
  EXPECT_FALSE(
      InteractiveGnMax(h, unnormalized, Interactive(100, 5, 0.5), rng).ok());
  const std::vector<double> p = {0.5, 0.5};
  EXPECT_FALSE(InteractiveGnMax(h, p, Interactive(99, 5, 0.5), rng).ok());
  EXPECT_FALSE(InteractiveGnMax(h, p, Interactive(100, 5, 1.0), rng).ok());
}

// The teacher check runs first: replaying its noise draw tells which branch
// must be taken, and a passing check never yields reinforcement.
TEST(InteractiveGnMaxTest, TeacherCheckPrecedesReinforcement) {
  const VoteHistogram h = H({60, 30, 10});
  const std::vector<double> p = {0.85, 0.1, 0.05};
  const InteractiveConfig config = Interactive(100, 10.0, 0.5, 15.0);
  const double disagreement = MaxDisagreement(h, p, 100);
  int teacher = 0, reinforce = 0;
  for (uint64_t seed = 0; seed < 20000; ++seed) {
    RandomSource replay(seed), rng(seed);
    const bool passes =
        disagreement + config.sigma1 * replay.StandardNormal() >=
        config.threshold;
    const AggregationOutcome out = *InteractiveGnMax(h, p, config, rng);
    if (passes) {
      EXPECT_EQ(out.kind, Kind::kTeacherLabel);
      ++teacher;
    } else {
      EXPECT_EQ(out, AggregationOutcome::ReinforceStudent(0));
      ++reinforce;
    }
  }
  EXPECT_GT(teacher, 1000);
  EXPECT_GT(reinforce, 1000);
}

TEST(MaxDisagreementTest, UsesScaledStudentProbabilities) {
  const VoteHistogram h = H({6, 3, 1});
  const std::vector<double> p = {0.2, 0.5, 0.3};
  EXPECT_DOUBLE_EQ(MaxDisagreement(h, p, 10), 4.0);
}

}  // namespace
}  // namespace pate
