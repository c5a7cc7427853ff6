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

// Pairwise-ratio membership inference (RMIA).
//
// Each sample x gets a calibrated ratio
//
//   r(x) = p_target(x) / Pbar(x),   Pbar = ((1 + alpha) p_out + (1 - alpha)) /
//   2
//
// where p_out averages the out-model probabilities of x. The pairwise
// statistic is L(x, z) = r(x) / r(z), and the score of x is the fraction of
// population samples z with L(x, z) >= gamma.

#ifndef PRIVAUDIT_RMIA_H_
#define PRIVAUDIT_RMIA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "privaudit/observation.h"

namespace privaudit {

inline constexpr double kDefaultRmiaAlpha = 0.3;
inline constexpr double kDefaultRmiaGamma = 1.0;
inline constexpr double kDefaultProbFloor = 1e-12;

struct RmiaConfig {
  double gamma = kDefaultRmiaGamma;
  // Unset: tuned with AutotuneAlpha over `alpha_grid`.
  std::optional<double> alpha = kDefaultRmiaAlpha;
  std::vector<double> alpha_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9, 1.0};
  // Rows used as reference samples z; they are never scored.
  std::vector<size_t> population_indices;
  double prob_floor = kDefaultProbFloor;

  absl::Status Validate(const LogitPanel& panel) const;
};

// sigmoid(logit) of `sample` under `model`, floored at prob_floor.
double TargetProb(const LogitPanel& panel, size_t sample, size_t model,
                  double prob_floor = kDefaultProbFloor);

// Mean TargetProb over the non-target models that did not train on `sample`.
absl::StatusOr<double> AverageOutProb(const LogitPanel& panel, size_t sample,
                                      double prob_floor = kDefaultProbFloor);

double InterpolatedMarginal(double p_out, double alpha,
                            double prob_floor = kDefaultProbFloor);

absl::StatusOr<double> PairwiseRatio(const LogitPanel& panel, size_t x,
                                     size_t z, double alpha,
                                     double prob_floor = kDefaultProbFloor);

// Requires config.alpha to be set.
absl::StatusOr<double> RmiaScore(const LogitPanel& panel, size_t x,
                                 const RmiaConfig& config);

// Leave-one-shadow-out tuning: every non-target model in turn acts as the
// target (its mask column is the ground truth), RMIA is run against it with
// the remaining shadows, and the grid value with the best mean AUC wins.
// Ties go to the smaller alpha.
absl::StatusOr<double> AutotuneAlpha(const LogitPanel& panel,
                                     const std::vector<double>& candidate_grid,
                                     const RmiaConfig& config);

// Draws `count` distinct rows uniformly at random, returned in ascending order.
absl::StatusOr<std::vector<size_t>> SamplePopulation(size_t n_samples,
                                                     size_t count,
                                                     uint64_t seed);

// One record per non-population row (OpenMP-parallel over canaries).
absl::StatusOr<ScoreRecordSet> RunRmia(const LogitPanel& panel,
                                       const RmiaConfig& config);

namespace serial {
// Single-threaded reference that evaluates every L(x, z) through
// PairwiseRatio.
absl::StatusOr<ScoreRecordSet> RunRmia(const LogitPanel& panel,
                                       const RmiaConfig& config);
}  // namespace serial

}  // namespace privaudit

#endif  // PRIVAUDIT_RMIA_H_
