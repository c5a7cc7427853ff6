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

#include "privaudit/roc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"
#include "test_util.h"

namespace privaudit {
namespace {

using testing::MakeSet;

constexpr double kInf = std::numeric_limits<double>::infinity();

ScoreRecordSet HandSet() { return MakeSet({0.9, 0.4}, {0.6, 0.1}); }

// O(n^2) pair counting in integers.
double BruteForceAuc(const ScoreRecordSet& set) {
  int64_t twice_wins = 0, pairs = 0;
  for (const auto& a : set.records()) {
    if (!a.member) continue;
    for (const auto& b : set.records()) {
      if (b.member) continue;
      ++pairs;
      twice_wins += a.score > b.score ? 2 : (a.score == b.score ? 1 : 0);
    }
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pairs));
}

ScoreRecordSet RandomSet(std::mt19937_64& rng, size_t n) {
  std::uniform_int_distribution<int> value(0, 9);
  std::vector<double> members, nonmembers;
  members.push_back(value(rng));
  nonmembers.push_back(value(rng));
  std::bernoulli_distribution coin(0.5);
  for (size_t i = 2; i < n; ++i) {
    (coin(rng) ? members : nonmembers).push_back(value(rng) * 0.5);
  }
  return MakeSet(members, nonmembers);
}

TEST(RatesTest, HandExample) {
  auto r = RatesAtThreshold(HandSet(), 0.5);
  ASSERT_OK(r);
  EXPECT_EQ(r->tpr, 0.5);
  EXPECT_EQ(r->fpr, 0.5);
  EXPECT_EQ(r->tnr, 0.5);
  EXPECT_EQ(r->fnr, 0.5);
}

TEST(RatesTest, ExtremeThresholds) {
  auto low = RatesAtThreshold(HandSet(), -1.0);
  EXPECT_EQ(low->tpr, 1.0);
  EXPECT_EQ(low->fpr, 1.0);
  auto high = RatesAtThreshold(HandSet(), 2.0);
  EXPECT_EQ(high->tpr, 0.0);
  EXPECT_EQ(high->fpr, 0.0);
  // Inclusive rule.
  EXPECT_EQ(RatesAtThreshold(HandSet(), 0.9)->tpr, 0.5);
}

TEST(RatesTest, ComplementsSumToOne) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    ScoreRecordSet set = RandomSet(rng, 30);
    for (double tau = -1; tau <= 5; tau += 0.25) {
      auto r = RatesAtThreshold(set, tau);
      ASSERT_OK(r);
      EXPECT_NEAR(r->tpr + r->fnr, 1.0, 1e-12);
      EXPECT_NEAR(r->tnr + r->fpr, 1.0, 1e-12);
    }
  }
}

TEST(RatesTest, MissingClassIsAnError) {
  EXPECT_FALSE(RatesAtThreshold(MakeSet({1, 2}, {}), 0).ok());
  EXPECT_FALSE(Auc(MakeSet({}, {1})).ok());
}

TEST(AucTest, Examples) {
  EXPECT_EQ(*Auc(HandSet()), 0.75);
  EXPECT_EQ(*Auc(MakeSet({2, 3}, {0, 1})), 1.0);
  EXPECT_EQ(*Auc(MakeSet({1, 1, 1}, {1, 1})), 0.5);
}

TEST(AucPropertyTest, MatchesPairCounting) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<size_t> size(2, 200);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreRecordSet set = RandomSet(rng, size(rng));
    EXPECT_NEAR(*Auc(set), BruteForceAuc(set), 1e-12);
  }
}

TEST(AucPropertyTest, MonotoneTransformInvariance) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    ScoreRecordSet set = RandomSet(rng, 50);
    std::vector<ScoreRecord> mapped = set.records();
    for (auto& r : mapped) r.score = std::exp(3 * r.score) - 7;
    auto other = ScoreRecordSet::Create(mapped);
    ASSERT_OK(other);
    EXPECT_EQ(*Auc(set), *Auc(*other));
    auto a = RocCurve(set);
    auto b = RocCurve(*other);
    ASSERT_EQ(a->size(), b->size());
    for (size_t i = 0; i < a->size(); ++i) {
      EXPECT_EQ((*a)[i].tpr, (*b)[i].tpr);
      EXPECT_EQ((*a)[i].fpr, (*b)[i].fpr);
    }
  }
}

TEST(AucPropertyTest, LabelSwap) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    ScoreRecordSet set = RandomSet(rng, 40);
    std::vector<ScoreRecord> swapped = set.records();
    for (auto& r : swapped) r.member = !r.member;
    auto other = ScoreRecordSet::Create(swapped);
    ASSERT_OK(other);
    EXPECT_NEAR(*Auc(*other), 1.0 - *Auc(set), 1e-12);
  }
}

TEST(RocCurveTest, PointsAndArea) {
  auto curve = RocCurve(MakeSet({2, 2}, {1, 2}));
  ASSERT_OK(curve);
  ASSERT_EQ(curve->size(), 4u);
  EXPECT_EQ(curve->front().threshold, kInf);
  EXPECT_EQ(curve->front().tpr, 0.0);
  EXPECT_EQ(curve->front().fpr, 0.0);
  EXPECT_EQ(curve->back().threshold, -kInf);
  EXPECT_EQ(curve->back().tpr, 1.0);
  EXPECT_EQ(curve->back().fpr, 1.0);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreRecordSet set = RandomSet(rng, 60);
    auto c = RocCurve(set);
    ASSERT_OK(c);
    for (size_t i = 1; i < c->size(); ++i) {
      EXPECT_GE((*c)[i].fpr, (*c)[i - 1].fpr);
      EXPECT_GE((*c)[i].tpr, (*c)[i - 1].tpr);
    }
    EXPECT_NEAR(TrapezoidArea(*c), *Auc(set), 1e-12);
  }
}

TEST(RocCurveTest, Csv) {
  auto curve = RocCurve(HandSet());
  ASSERT_OK(curve);
  const std::string csv = RocCsv(*curve);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "threshold,tpr,fpr,tnr,fnr");
  EXPECT_NE(csv.find("+inf,0,0,1,1"), std::string::npos);
  EXPECT_NE(csv.find("-inf,1,1,0,0"), std::string::npos);
}

RatePoint Rates(double tpr, double fpr, double tnr, double fnr) {
  return {0.0, tpr, fpr, tnr, fnr};
}

TEST(EpsilonAtThresholdTest, Examples) {
  EXPECT_NEAR(EpsilonAtThreshold(Rates(0.02, 0.001, 0.5, 0.5), 0).epsilon,
              2.9957322735539910, 1e-12);
  EXPECT_EQ(EpsilonAtThreshold(Rates(0.3, 0.3, 0.7, 0.7), 0).epsilon, 0.0);
  EXPECT_EQ(EpsilonAtThreshold(Rates(0.01, 0.5, 0.015, 0.99), 0.02).epsilon,
            -kInf);
  EXPECT_EQ(EpsilonAtThreshold(Rates(0.5, 0.0, 1.0, 0.5), 0).epsilon, kInf);
  // Negative finite values survive.
  EXPECT_NEAR(EpsilonAtThreshold(Rates(0.2, 0.4, 0.6, 0.8), 0).epsilon,
              std::log(0.75), 1e-15);
  EXPECT_EQ(EpsilonAtThreshold(Rates(0.02, 0.001, 0.5, 0.5), 0.01).delta, 0.01);
}

TEST(EpsilonAtThresholdTest, EqualRatesGiveZeroFirstBranch) {
  for (double p : {0.01, 0.3, 0.5, 0.99}) {
    // The second branch is also ln 1 here.
    EXPECT_EQ(EpsilonAtThreshold(Rates(p, p, 1 - p, 1 - p), 0).epsilon, 0.0);
  }
}

TEST(ThresholdGridTest, OrderStatistics) {
  std::vector<double> members, nonmembers;
  for (int i = 1; i <= 100; ++i) members.push_back(i);
  for (int i = 1; i <= 100; ++i) nonmembers.push_back(i + 0.5);
  ScoreRecordSet set = MakeSet(members, nonmembers);
  auto grid = ThresholdGrid(set);
  ASSERT_OK(grid);
  EXPECT_LE(grid->size(), 4u * 99u);
  EXPECT_TRUE(std::is_sorted(grid->begin(), grid->end()));
  EXPECT_EQ(std::adjacent_find(grid->begin(), grid->end()), grid->end());
  // TPR hits every level exactly at a member order statistic.
  for (int j = 1; j <= 99; ++j) {
    const double p = j / 100.0;
    bool hit = false;
    for (double tau : *grid) {
      if (RatesAtThreshold(set, tau)->tpr == p) hit = true;
    }
    EXPECT_TRUE(hit) << p;
  }
}

TEST(ThresholdGridTest, TinySetAndBound) {
  auto grid = ThresholdGrid(MakeSet({1.0}, {0.0}));
  ASSERT_OK(grid);
  EXPECT_LE(grid->size(), 2u);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::normal_distribution<double> noise;
    std::vector<double> m, n;
    for (int i = 0; i < 1000; ++i) m.push_back(noise(rng) + 1);
    for (int i = 0; i < 1000; ++i) n.push_back(noise(rng));
    auto g = ThresholdGrid(MakeSet(m, n));
    ASSERT_OK(g);
    EXPECT_LE(g->size(), 4u * 99u);
  }
}

TEST(EpsilonAtTprTest, Examples) {
  std::vector<double> members;
  for (int i = 1; i <= 100; ++i) members.push_back(i);
  ScoreRecordSet set = MakeSet(members, {0.5, 50.5, 99.5});
  EXPECT_EQ(*ThresholdAtTpr(set, 0.01), 100.0);
  EXPECT_EQ(*ThresholdAtTpr(set, 1.0), 1.0);
  auto eps = EpsilonAtTpr(set, 0.01, 0.0);
  ASSERT_OK(eps);
  EXPECT_EQ(eps->threshold, 100.0);
  // TPR 0.01 against FPR 0 is the +inf sentinel.
  EXPECT_EQ(eps->epsilon, kInf);
  EXPECT_FALSE(EpsilonAtTpr(set, 0.0, 0.0).ok());
}

TEST(AccuracyTest, Examples) {
  EXPECT_EQ(*Accuracy(MakeSet({2, 3}, {0, 1}), 1.5), 1.0);
  auto best = BestAccuracy(HandSet());
  ASSERT_OK(best);
  EXPECT_EQ(best->accuracy, 0.75);
  auto flat = BestAccuracy(MakeSet({1, 1, 1}, {1}));
  ASSERT_OK(flat);
  EXPECT_EQ(flat->accuracy, 0.75);
  auto flat2 = BestAccuracy(MakeSet({1}, {1, 1, 1}));
  EXPECT_EQ(flat2->accuracy, 0.75);
}

TEST(AccuracyTest, BestMatchesSweep) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    ScoreRecordSet set = RandomSet(rng, 40);
    double best = *Accuracy(set, kInf);
    for (const auto& r : set.records()) {
      best = std::max(best, *Accuracy(set, r.score));
    }
    EXPECT_EQ(BestAccuracy(set)->accuracy, best);
  }
}

TEST(FormatExtendedTest, Sentinels) {
  EXPECT_EQ(FormatExtended(kInf), "+inf");
  EXPECT_EQ(FormatExtended(-kInf), "-inf");
  EXPECT_EQ(FormatExtended(0.25), "0.25");
}

}  // namespace
}  // namespace privaudit
