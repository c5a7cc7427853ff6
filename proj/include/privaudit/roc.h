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

// Threshold-sweep metrics over a ScoreRecordSet.
//
// The adversary guesses "member" iff score >= threshold (inclusive), so
// every rate is a step function of the threshold that only changes at
// observed scores.

#ifndef PRIVAUDIT_ROC_H_
#define PRIVAUDIT_ROC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privaudit/observation.h"

namespace privaudit {

struct RatePoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double tnr = 0.0;
  double fnr = 0.0;
};

// epsilon may be -inf or +inf.
struct EpsilonEstimate {
  double threshold = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

struct AccuracyPoint {
  double threshold = 0.0;
  double accuracy = 0.0;
};

// Distinct scores in ascending order with per-value class counts. This is the
// sufficient statistic for every metric in this file.
class ScoreLadder {
 public:
  // Fails on an empty set.
  static absl::StatusOr<ScoreLadder> Build(const ScoreRecordSet& set);

  const std::vector<double>& values() const { return values_; }
  const std::vector<uint64_t>& members() const { return members_; }
  const std::vector<uint64_t>& nonmembers() const { return nonmembers_; }
  uint64_t total_members() const { return total_members_; }
  uint64_t total_nonmembers() const { return total_nonmembers_; }

  // Index of the first rung with value >= tau (== size() if none).
  size_t FirstAtLeast(double tau) const;
  size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
  std::vector<uint64_t> members_;
  std::vector<uint64_t> nonmembers_;
  uint64_t total_members_ = 0;
  uint64_t total_nonmembers_ = 0;
};

absl::StatusOr<RatePoint> RatesAtThreshold(const ScoreRecordSet& set,
                                           double threshold);

// Mann-Whitney AUC: Pr[member > non-member] + Pr[tie] / 2, exact up to the
// final division.
absl::StatusOr<double> Auc(const ScoreRecordSet& set);

// Points for threshold +inf, every distinct score (descending), and -inf.
absl::StatusOr<std::vector<RatePoint>> RocCurve(const ScoreRecordSet& set);

double TrapezoidArea(const std::vector<RatePoint>& curve);

// CSV with header "threshold,tpr,fpr,tnr,fnr"; infinite thresholds are
// written as "+inf" / "-inf".
std::string RocCsv(const std::vector<RatePoint>& curve);

// max{ ln((TPR - delta) / FPR), ln((TNR - delta) / FNR) }. A branch with a
// non-positive numerator is -inf; a zero denominator under a positive
// numerator is +inf. Requires delta in [0, 1).
EpsilonEstimate EpsilonAtThreshold(const RatePoint& rates, double delta);

// Thresholds at which each of TPR, FPR, TNR, FNR first reaches each level
// p = 0.01, ..., 0.99 (see ThresholdGrid in roc.cc for the step-function
// rule). Deduplicated and ascending; at most 4 * 99 entries.
absl::StatusOr<std::vector<double>> ThresholdGrid(const ScoreRecordSet& set);

// Largest observed threshold with TPR >= tpr_target.
absl::StatusOr<double> ThresholdAtTpr(const ScoreRecordSet& set,
                                      double tpr_target);
absl::StatusOr<EpsilonEstimate> EpsilonAtTpr(const ScoreRecordSet& set,
                                             double tpr_target, double delta);

absl::StatusOr<double> Accuracy(const ScoreRecordSet& set, double threshold);
// Maximizes accuracy over every observed score and +inf; ties keep the
// smaller threshold.
absl::StatusOr<AccuracyPoint> BestAccuracy(const ScoreRecordSet& set);

// "+inf", "-inf", or the shortest round-trip decimal.
std::string FormatExtended(double value);

}  // namespace privaudit

#endif  // PRIVAUDIT_ROC_H_
