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

#include "absl/strings/str_cat.h"

namespace privaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RatePoint RatesFromCounts(double threshold, uint64_t members_at_or_above,
                          uint64_t nonmembers_at_or_above, uint64_t members,
                          uint64_t nonmembers) {
  const double p = static_cast<double>(members);
  const double n = static_cast<double>(nonmembers);
  RatePoint r;
  r.threshold = threshold;
  r.tpr = static_cast<double>(members_at_or_above) / p;
  r.fnr = static_cast<double>(members - members_at_or_above) / p;
  r.fpr = static_cast<double>(nonmembers_at_or_above) / n;
  r.tnr = static_cast<double>(nonmembers - nonmembers_at_or_above) / n;
  return r;
}

// Suffix sums: counts at or above each rung, plus a trailing zero entry.
void SuffixCounts(const ScoreLadder& ladder, std::vector<uint64_t>& mem_ge,
                  std::vector<uint64_t>& non_ge) {
  const size_t g = ladder.size();
  mem_ge.assign(g + 1, 0);
  non_ge.assign(g + 1, 0);
  for (size_t i = g; i-- > 0;) {
    mem_ge[i] = mem_ge[i + 1] + ladder.members()[i];
    non_ge[i] = non_ge[i + 1] + ladder.nonmembers()[i];
  }
}

absl::StatusOr<ScoreLadder> BothClassLadder(const ScoreRecordSet& set) {
  if (absl::Status s = set.RequireBothClasses(); !s.ok()) return s;
  return ScoreLadder::Build(set);
}

double Branch(double numerator, double denominator) {
  if (numerator <= 0.0) return -kInf;
  if (denominator == 0.0) return kInf;
  return std::log(numerator / denominator);
}

}  // namespace

absl::StatusOr<ScoreLadder> ScoreLadder::Build(const ScoreRecordSet& set) {
  if (set.empty()) return absl::InvalidArgumentError("score set is empty");
  std::vector<std::pair<double, bool>> pairs;
  pairs.reserve(set.size());
  for (const auto& r : set.records()) pairs.emplace_back(r.score, r.member);
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ScoreLadder ladder;
  for (const auto& [score, member] : pairs) {
    if (ladder.values_.empty() || ladder.values_.back() != score) {
      ladder.values_.push_back(score);
      ladder.members_.push_back(0);
      ladder.nonmembers_.push_back(0);
    }
    (member ? ladder.members_ : ladder.nonmembers_).back() += 1;
    (member ? ladder.total_members_ : ladder.total_nonmembers_) += 1;
  }
  return ladder;
}

size_t ScoreLadder::FirstAtLeast(double tau) const {
  return static_cast<size_t>(
      std::lower_bound(values_.begin(), values_.end(), tau) - values_.begin());
}

absl::StatusOr<RatePoint> RatesAtThreshold(const ScoreRecordSet& set,
                                           double threshold) {
  if (absl::Status s = set.RequireBothClasses(); !s.ok()) return s;
  uint64_t mem_ge = 0, non_ge = 0;
  for (const auto& r : set.records()) {
    if (r.score >= threshold) (r.member ? mem_ge : non_ge) += 1;
  }
  return RatesFromCounts(threshold, mem_ge, non_ge, set.num_members(),
                         set.num_nonmembers());
}

absl::StatusOr<double> Auc(const ScoreRecordSet& set) {
  auto ladder = BothClassLadder(set);
  if (!ladder.ok()) return ladder.status();
  // Twice the U statistic, so ties contribute whole units.
  uint64_t twice_u = 0;
  uint64_t nonmembers_below = 0;
  for (size_t g = 0; g < ladder->size(); ++g) {
    twice_u +=
        ladder->members()[g] * (2 * nonmembers_below + ladder->nonmembers()[g]);
    nonmembers_below += ladder->nonmembers()[g];
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(ladder->total_members()) *
          static_cast<double>(ladder->total_nonmembers()));
}

absl::StatusOr<std::vector<RatePoint>> RocCurve(const ScoreRecordSet& set) {
  auto ladder = BothClassLadder(set);
  if (!ladder.ok()) return ladder.status();
  std::vector<uint64_t> mem_ge, non_ge;
  SuffixCounts(*ladder, mem_ge, non_ge);
  const uint64_t p = ladder->total_members(), n = ladder->total_nonmembers();
  std::vector<RatePoint> curve;
  curve.reserve(ladder->size() + 2);
  curve.push_back(RatesFromCounts(kInf, 0, 0, p, n));
  for (size_t g = ladder->size(); g-- > 0;) {
    curve.push_back(
        RatesFromCounts(ladder->values()[g], mem_ge[g], non_ge[g], p, n));
  }
  curve.push_back(RatesFromCounts(-kInf, p, n, p, n));
  return curve;
}

double TrapezoidArea(const std::vector<RatePoint>& curve) {
  double area = 0.0;
  for (size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) *
            (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  }
  return area;
}

std::string FormatExtended(double value) {
  if (value == kInf) return "+inf";
  if (value == -kInf) return "-inf";
  return FormatDouble(value);
}

std::string RocCsv(const std::vector<RatePoint>& curve) {
  std::string out = "threshold,tpr,fpr,tnr,fnr\n";
  for (const auto& r : curve) {
    absl::StrAppend(&out, FormatExtended(r.threshold), ",", FormatDouble(r.tpr),
                    ",", FormatDouble(r.fpr), ",", FormatDouble(r.tnr), ",",
                    FormatDouble(r.fnr), "\n");
  }
  return out;
}

EpsilonEstimate EpsilonAtThreshold(const RatePoint& rates, double delta) {
  EpsilonEstimate e;
  e.threshold = rates.threshold;
  e.delta = delta;
  e.epsilon = std::max(Branch(rates.tpr - delta, rates.fpr),
                       Branch(rates.tnr - delta, rates.fnr));
  return e;
}

// Empirical rates are step functions, so "rate == p" is realized as the
// observed threshold closest to the level from the qualifying side: TPR and
// FPR fall as the threshold rises, so the largest threshold with rate >= p
// is taken; TNR and FNR rise, so the smallest threshold with rate >= p is
// taken. Comparisons are done on integer counts (100 * count >= k * total).
absl::StatusOr<std::vector<double>> ThresholdGrid(const ScoreRecordSet& set) {
  auto ladder = BothClassLadder(set);
  if (!ladder.ok()) return ladder.status();
  std::vector<uint64_t> mem_ge, non_ge;
  SuffixCounts(*ladder, mem_ge, non_ge);
  const uint64_t p = ladder->total_members(), n = ladder->total_nonmembers();
  const size_t g = ladder->size();

  std::vector<double> grid;
  grid.reserve(4 * 99);
  for (uint64_t k = 1; k <= 99; ++k) {
    // Falling rates: scan from the top rung down.
    for (const auto& [counts, total] :
         {std::pair{&mem_ge, p}, std::pair{&non_ge, n}}) {
      for (size_t i = g; i-- > 0;) {
        if (100 * (*counts)[i] >= k * total) {
          grid.push_back(ladder->values()[i]);
          break;
        }
      }
    }
    // Rising rates: below-threshold counts are total - at_or_above.
    for (const auto& [counts, total] :
         {std::pair{&non_ge, n}, std::pair{&mem_ge, p}}) {
      for (size_t i = 0; i < g; ++i) {
        if (100 * (total - (*counts)[i]) >= k * total) {
          grid.push_back(ladder->values()[i]);
          break;
        }
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

absl::StatusOr<double> ThresholdAtTpr(const ScoreRecordSet& set,
                                      double tpr_target) {
  if (!(tpr_target > 0.0 && tpr_target <= 1.0)) {
    return absl::InvalidArgumentError("tpr_target must lie in (0, 1]");
  }
  auto ladder = BothClassLadder(set);
  if (!ladder.ok()) return ladder.status();
  std::vector<uint64_t> mem_ge, non_ge;
  SuffixCounts(*ladder, mem_ge, non_ge);
  const double needed =
      tpr_target * static_cast<double>(ladder->total_members()) * (1 - 1e-12);
  for (size_t i = ladder->size(); i-- > 0;) {
    if (static_cast<double>(mem_ge[i]) >= needed) return ladder->values()[i];
  }
  return ladder->values().front();
}

absl::StatusOr<EpsilonEstimate> EpsilonAtTpr(const ScoreRecordSet& set,
                                             double tpr_target, double delta) {
  auto tau = ThresholdAtTpr(set, tpr_target);
  if (!tau.ok()) return tau.status();
  auto rates = RatesAtThreshold(set, *tau);
  if (!rates.ok()) return rates.status();
  return EpsilonAtThreshold(*rates, delta);
}

absl::StatusOr<double> Accuracy(const ScoreRecordSet& set, double threshold) {
  if (set.empty()) return absl::InvalidArgumentError("score set is empty");
  size_t correct = 0;
  for (const auto& r : set.records()) {
    if ((r.score >= threshold) == r.member) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

absl::StatusOr<AccuracyPoint> BestAccuracy(const ScoreRecordSet& set) {
  auto ladder = ScoreLadder::Build(set);
  if (!ladder.ok()) return ladder.status();
  std::vector<uint64_t> mem_ge, non_ge;
  SuffixCounts(*ladder, mem_ge, non_ge);
  const uint64_t n = ladder->total_nonmembers();
  const double total = static_cast<double>(set.size());
  AccuracyPoint best{kInf, static_cast<double>(n) / total};
  uint64_t best_correct = n;
  // Iterating from the top rung down, ">=" lets smaller thresholds win ties.
  for (size_t i = ladder->size(); i-- > 0;) {
    const uint64_t correct = mem_ge[i] + (n - non_ge[i]);
    if (correct >= best_correct) {
      best_correct = correct;
      best = {ladder->values()[i], static_cast<double>(correct) / total};
    }
  }
  return best;
}

}  // namespace privaudit
