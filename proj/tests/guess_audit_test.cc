/*
 * Copyright 2026 The Privaudit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "privaudit/guess_audit.h"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "privaudit/synthetic.h"
#include "test_util.h"

namespace privaudit {
namespace {

using testing::MakeSet;

// Direct summation of the binomial pmf; fine for small n.
double SummedTail(int n, double p, int c) {
  double total = 0;
  for (int k = c; k <= n; ++k) {
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n - k + 1.0) + k * std::log(p) +
                      (n - k) * std::log1p(-p));
  }
  return total;
}

TEST(BinomialTailTest, Examples) {
  EXPECT_EQ(BinomialTail(10, 0.3, 0), 1.0);
  EXPECT_NEAR(BinomialTail(2, 0.5, 2), 0.25, 1e-15);
  EXPECT_NEAR(BinomialTail(20, 0.7, 15), 0.41637082944748138, 1e-12);
  EXPECT_EQ(BinomialTail(5, 0.0, 1), 0.0);
  EXPECT_EQ(BinomialTail(5, 1.0, 5), 1.0);
}

TEST(BinomialTailTest, MatchesSummation) {
  for (int n : {1, 7, 30, 100}) {
    for (double p : {0.05, 0.5, 0.73, 0.99}) {
      for (int c = 1; c <= n; c += std::max(1, n / 9)) {
        const double expected = SummedTail(n, p, c);
        EXPECT_NEAR(BinomialTail(n, p, c), expected, 1e-10 * expected + 1e-300)
            << n << " " << p << " " << c;
      }
    }
  }
}

TEST(EpsilonLowerBoundTest, AllCorrectClosedForm) {
  // (e^eps / (e^eps + 1))^1000 = 0.05.
  const double q = std::pow(0.05, 1.0 / 1000);
  const double closed_form = std::log(q / (1 - q));
  EXPECT_NEAR(closed_form, 5.8090683385466120, 1e-12);
  const double eps = EpsilonLowerBound({1000, 1000, 1000}, 0.0, 0.05);
  EXPECT_NEAR(eps, closed_form, 1e-3);
  EXPECT_LE(eps, closed_form);
}

TEST(EpsilonLowerBoundTest, ChanceLevelGivesZero) {
  for (double delta : {0.0, 1e-6}) {
    EXPECT_EQ(EpsilonLowerBound({1000, 500, 250}, delta, 0.05), 0.0);
  }
  // m * delta alone exceeds the level.
  EXPECT_EQ(EpsilonLowerBound({1000, 1000, 1000}, 1e-3, 0.05), 0.0);
}

TEST(EpsilonLowerBoundTest, Monotonicity) {
  double previous = 0;
  for (size_t c = 50; c <= 100; ++c) {
    const double eps = EpsilonLowerBound({500, 100, c}, 0.0, 0.05);
    EXPECT_GE(eps, previous);
    previous = eps;
  }
  EXPECT_GE(EpsilonLowerBound({500, 100, 90}, 0, 0.05),
            EpsilonLowerBound({500, 100, 90}, 0, 0.01));
  EXPECT_GE(EpsilonLowerBound({500, 100, 90}, 0, 0.05),
            EpsilonLowerBound({500, 100, 90}, 1e-5, 0.05));
}

TEST(EpsilonLowerBoundTest, BoundIsAtTheRejectionEdge) {
  const GuessSummary s{2000, 300, 260};
  const double eps = EpsilonLowerBound(s, 0.0, 0.05);
  auto tail = [&](double e) {
    return BinomialTail(300, std::exp(e) / (std::exp(e) + 1), 260);
  };
  EXPECT_LT(tail(eps), 0.05);
  EXPECT_GE(tail(eps + 1e-4), 0.05);
}

TEST(MakeGuessesTest, Examples) {
  ScoreRecordSet set = MakeSet({0.9, 0.8}, {0.2, 0.1});
  auto two = MakeGuesses(set, 2, GuessStrategy::kTwoSided);
  ASSERT_OK(two);
  EXPECT_EQ(two->c, 2u);
  EXPECT_EQ(two->c_hat, 2u);
  EXPECT_EQ(two->m, 4u);
  for (size_t c_hat : {2, 4}) {
    auto g = MakeGuesses(set, c_hat, GuessStrategy::kTwoSided);
    EXPECT_EQ(g->c, g->c_hat);
  }
  auto odd = MakeGuesses(set, 3, GuessStrategy::kTwoSided);
  EXPECT_EQ(odd->c_hat, 2u);

  ScoreRecordSet anti = MakeSet({0.1, 0.2}, {0.8, 0.9});
  EXPECT_EQ(MakeGuesses(anti, 2, GuessStrategy::kOneSided)->c, 0u);
  EXPECT_FALSE(MakeGuesses(set, 0, GuessStrategy::kOneSided).ok());
  EXPECT_FALSE(MakeGuesses(set, 5, GuessStrategy::kOneSided).ok());
}

TEST(MakeGuessesTest, TiesBrokenBySampleId) {
  // All scores equal: the top pick is the smallest id, "m0".
  ScoreRecordSet set = MakeSet({1.0}, {1.0, 1.0});
  EXPECT_EQ(MakeGuesses(set, 1, GuessStrategy::kOneSided)->c, 1u);
}

TEST(GuessGridTest, LogSpacedAndEndsAtM) {
  std::vector<size_t> grid = GuessGrid(10, 2000, 20);
  EXPECT_EQ(grid.front(), 10u);
  EXPECT_EQ(grid.back(), 2000u);
  EXPECT_LE(grid.size(), 20u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_EQ(std::adjacent_find(grid.begin(), grid.end()), grid.end());
  EXPECT_EQ(GuessGrid(10, 12, 20).back(), 12u);
  EXPECT_TRUE(GuessGrid(10, 5, 20).empty());
}

TEST(SweepTest, TableOrderAndBest) {
  auto set = GenShiftedGaussianScores({500, 3.0, 1.0, 4});
  ASSERT_OK(set);
  GuessAuditConfig config;
  auto result = Sweep(*set, config);
  ASSERT_OK(result);
  EXPECT_EQ(result->bound_name, "binomial");
  EXPECT_DOUBLE_EQ(result->row_significance,
                   0.05 / static_cast<double>(result->table.size()));
  double max_eps = -1;
  for (const SweepRow& row : result->table)
    max_eps = std::max(max_eps, row.epsilon);
  EXPECT_EQ(result->best.epsilon, max_eps);
  for (size_t i = 1; i < result->table.size(); ++i) {
    const auto& a = result->table[i - 1].summary;
    const auto& b = result->table[i].summary;
    if (a.strategy == b.strategy) {
      EXPECT_LT(a.c_hat, b.c_hat);
    } else {
      EXPECT_EQ(a.strategy, GuessStrategy::kOneSided);
    }
  }
  const std::string csv = SweepCsv(*result);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "strategy,c_hat,c,epsilon");
}

TEST(SweepTest, DeterministicAcrossThreadCounts) {
  auto set = GenShiftedGaussianScores({300, 2.0, 1.0, 6});
  ASSERT_OK(set);
  omp_set_num_threads(1);
  auto a = Sweep(*set, GuessAuditConfig());
  omp_set_num_threads(4);
  auto b = Sweep(*set, GuessAuditConfig());
  ASSERT_OK(a);
  ASSERT_OK(b);
  EXPECT_EQ(SweepCsv(*a), SweepCsv(*b));
}

TEST(SweepTest, TwoSidedDominatesOnSymmetricScores) {
  auto set = GenShiftedGaussianScores({1000, 3.0, 1.0, 10});
  ASSERT_OK(set);
  GuessAuditConfig one;
  one.strategies = {GuessStrategy::kOneSided};
  GuessAuditConfig two;
  two.strategies = {GuessStrategy::kTwoSided};
  EXPECT_GE(Sweep(*set, two)->best.epsilon, Sweep(*set, one)->best.epsilon);
}

TEST(SweepTest, ErrorsAndPlugin) {
  ScoreRecordSet tiny = MakeSet({1, 2}, {0});
  EXPECT_FALSE(Sweep(tiny, GuessAuditConfig()).ok());

  GuessAuditConfig plugin;
  plugin.bound = BoundKind::kFdpPlugin;
  EXPECT_EQ(plugin.Validate().code(), absl::StatusCode::kFailedPrecondition);
  plugin.plugin = std::make_shared<BinomialGuessBound>();
  EXPECT_OK(plugin.Validate());

  GuessAuditConfig bad;
  bad.significance = 0.6;
  EXPECT_FALSE(bad.Validate().ok());
  bad = GuessAuditConfig();
  bad.grid_min = 0;
  EXPECT_FALSE(bad.Validate().ok());
}

TEST(ParseGuessStrategyTest, Names) {
  EXPECT_EQ(*ParseGuessStrategy("one_sided"), GuessStrategy::kOneSided);
  EXPECT_EQ(*ParseGuessStrategy("two-sided"), GuessStrategy::kTwoSided);
  EXPECT_FALSE(ParseGuessStrategy("three").ok());
  EXPECT_EQ(GuessStrategyName(GuessStrategy::kTwoSided), "two_sided");
}

// Randomized response at eps0 = 1 is exactly 1-DP, so the audit should
// rarely claim more.
TEST(SweepTest, RandomizedResponseSoundness) {
  int exceed = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    auto set = GenRandomizedResponseGuesses(2000, 1.0, 500 + t);
    ASSERT_OK(set);
    auto result = Sweep(*set, GuessAuditConfig());
    ASSERT_OK(result);
    if (result->best.epsilon > 1.0) ++exceed;
  }
  EXPECT_LE(exceed, static_cast<int>(trials * (0.05 + 0.03)));
}

}  // namespace
}  // namespace privaudit
