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

// Bootstrap confidence intervals over attack-success metrics.
//
// Each round resamples the canary set, then records AUC, best accuracy and
// the empirical epsilon at every threshold of the full-data grid. Round r
// draws from its own generator MakeRng(seed, r), so results do not depend on
// how rounds are scheduled across threads.

#ifndef PRIVAUDIT_BOOTSTRAP_H_
#define PRIVAUDIT_BOOTSTRAP_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privaudit/observation.h"

namespace privaudit {

enum class Resampling {
  kWithReplacement,
  // m draws without replacement from m records: every round reproduces the
  // original set, so intervals collapse to points. Kept for comparison.
  kWithoutReplacement,
};

std::string ResamplingName(Resampling resampling);

struct BootstrapConfig {
  size_t k = 1000;
  double confidence = 0.95;
  double delta = 0.0;
  uint64_t seed = 0;
  Resampling resampling = Resampling::kWithReplacement;

  absl::Status Validate() const;
};

struct RoundMetrics {
  // Absent when the resample lost a class.
  std::optional<double> auc;
  double accuracy = 0.0;
  // One entry per requested threshold; empty when the resample lost a class.
  std::vector<double> epsilons;

  bool degenerate() const { return !auc.has_value(); }
  friend bool operator==(const RoundMetrics&, const RoundMetrics&) = default;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct IntervalReport {
  std::string metric;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  size_t rounds_used = 0;
};

struct EpsilonChoice {
  double threshold = 0.0;
  double epsilon = 0.0;
};

struct FinalEpsilon {
  // Largest finite interval upper bound (ties: smaller threshold).
  EpsilonChoice upper_rule;
  // Largest finite interval lower bound, the conservative reading.
  std::optional<EpsilonChoice> lower_rule;
  // Thresholds skipped because their upper bound was infinite.
  size_t excluded = 0;
};

struct BootstrapAudit {
  BootstrapConfig config;
  size_t m = 0;
  std::vector<double> thresholds;
  IntervalReport auc;
  IntervalReport accuracy;
  // Parallel to `thresholds`; absent where fewer than two rounds were usable.
  std::vector<std::optional<IntervalReport>> epsilon_by_threshold;
  FinalEpsilon final_epsilon;
  std::optional<double> tpr_target;
  std::optional<IntervalReport> epsilon_at_tpr;
  size_t degenerate_rounds = 0;
  std::vector<std::string> warnings;
};

// Runs cfg.k rounds (OpenMP-parallel over rounds) and evaluates the epsilon
// at each of `thresholds`.
absl::StatusOr<std::vector<RoundMetrics>> BootstrapRounds(
    const ScoreRecordSet& set, const std::vector<double>& thresholds,
    const BootstrapConfig& config);

// Percentile interval at levels (1 - c) / 2 and (1 + c) / 2 with linear
// interpolation between order statistics. Infinities sort as extremes; NaN
// is rejected.
absl::StatusOr<Interval> PercentileInterval(std::vector<double> values,
                                            double confidence);

// `per_threshold` holds (threshold, interval) pairs in ascending threshold
// order.
absl::StatusOr<FinalEpsilon> FinalEmpiricalEpsilon(
    const std::vector<std::pair<double, Interval>>& per_threshold);

// Full pipeline: full-data grid, rounds, intervals and the final epsilon.
// With `tpr_target`, also bootstraps the epsilon at the threshold that
// reaches that true-positive rate on the full data.
absl::StatusOr<BootstrapAudit> RunBootstrapAudit(
    const ScoreRecordSet& set, const BootstrapConfig& config,
    std::optional<double> tpr_target = std::nullopt);

namespace serial {
// Reference that materializes each resample and recomputes every metric
// through the public roc.h functions.
absl::StatusOr<std::vector<RoundMetrics>> BootstrapRounds(
    const ScoreRecordSet& set, const std::vector<double>& thresholds,
    const BootstrapConfig& config);
}  // namespace serial

}  // namespace privaudit

#endif  // PRIVAUDIT_BOOTSTRAP_H_
