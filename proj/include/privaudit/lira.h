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

// Likelihood-ratio membership inference over a LogitPanel.
//
// For each sample the shadow columns are split by the membership mask into
// "in" models (trained on the sample) and "out" models. Gaussians fitted to
// those logits are compared against the target model's logit:
//
//   online:  log N(phi*; mu_in, sd_in) - log N(phi*; mu_out, sd_out)
//   offline: (phi* - mu_out) / sd_out
//
// Both are oriented so that larger means "more likely a member".

#ifndef PRIVAUDIT_LIRA_H_
#define PRIVAUDIT_LIRA_H_

#include <cstddef>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "privaudit/observation.h"

namespace privaudit {

enum class LiraMode { kOnline, kOffline };
enum class VarianceMode { kPerSample, kGlobal };

inline constexpr double kDefaultStdFloor = 1e-6;
inline constexpr double kDefaultConfidenceClamp = 1e-6;

struct GaussianFit {
  double mean = 0.0;
  double std = 1.0;
};

struct LiraConfig {
  LiraMode mode = LiraMode::kOnline;
  // Unset: per-sample when every sample has two models on each side it
  // needs, otherwise global.
  std::optional<VarianceMode> variance_mode;
  double std_floor = kDefaultStdFloor;
  double confidence_clamp = kDefaultConfidenceClamp;

  absl::Status Validate() const;
};

std::string LiraModeName(LiraMode mode);
std::string VarianceModeName(VarianceMode mode);

// log(p / (1 - p)) with p clamped to [clamp, 1 - clamp].
double LogitTransform(double confidence,
                      double clamp = kDefaultConfidenceClamp);

// Resolves an unset variance mode against the panel.
VarianceMode ResolveVarianceMode(const LogitPanel& panel,
                                 const LiraConfig& config);

absl::StatusOr<double> LiraOnlineScore(const LogitPanel& panel, size_t sample,
                                       const LiraConfig& config);
absl::StatusOr<double> LiraOfflineScore(const LogitPanel& panel, size_t sample,
                                        const LiraConfig& config);

// Scores every sample (OpenMP-parallel over samples). Membership is copied
// from the panel's true_membership; sample ids are "s<index>".
absl::StatusOr<ScoreRecordSet> RunLira(const LogitPanel& panel,
                                       const LiraConfig& config);

namespace serial {
// Single-threaded reference for RunLira.
absl::StatusOr<ScoreRecordSet> RunLira(const LogitPanel& panel,
                                       const LiraConfig& config);
}  // namespace serial

}  // namespace privaudit

#endif  // PRIVAUDIT_LIRA_H_
