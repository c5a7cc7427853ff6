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

#include "privaudit/lira.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"

namespace privaudit {
namespace {

struct SideStats {
  size_t count = 0;
  double mean = 0.0;
  // Sum of squared deviations from `mean`.
  double sq_dev = 0.0;
};

struct SampleStats {
  SideStats in;
  SideStats out;
};

SideStats Summarize(const LogitPanel& panel, size_t sample, bool want_in) {
  SideStats s;
  // Shifted by the first value so equal logits give an exact mean.
  double shift = 0.0, sum = 0.0;
  for (size_t j = 0; j < panel.n_models(); ++j) {
    if (j == panel.target_index() || panel.in_model(sample, j) != want_in) {
      continue;
    }
    if (s.count == 0) shift = panel.logit(sample, j);
    sum += panel.logit(sample, j) - shift;
    ++s.count;
  }
  if (s.count == 0) return s;
  s.mean = shift + sum / static_cast<double>(s.count);
  for (size_t j = 0; j < panel.n_models(); ++j) {
    if (j == panel.target_index() || panel.in_model(sample, j) != want_in) {
      continue;
    }
    const double d = panel.logit(sample, j) - s.mean;
    s.sq_dev += d * d;
  }
  return s;
}

SampleStats SummarizeSample(const LogitPanel& panel, size_t sample) {
  return {Summarize(panel, sample, true), Summarize(panel, sample, false)};
}

size_t RequiredPerSide(VarianceMode mode) {
  return mode == VarianceMode::kPerSample ? 2 : 1;
}

absl::Status CheckSample(const SampleStats& stats, size_t sample, LiraMode mode,
                         VarianceMode variance) {
  const size_t need = RequiredPerSide(variance);
  const bool ok = stats.out.count >= need &&
                  (mode == LiraMode::kOffline || stats.in.count >= need);
  if (ok) return absl::OkStatus();
  if (mode == LiraMode::kOffline) {
    return absl::FailedPreconditionError(absl::StrCat(
        "sample ", sample, ": offline LiRA with ", VarianceModeName(variance),
        " variance needs >= ", need, " out-models, found ", stats.out.count));
  }
  return absl::FailedPreconditionError(
      absl::StrCat("sample ", sample, ": online LiRA with ",
                   VarianceModeName(variance), " variance needs >= ", need,
                   " in-models and >= ", need, " out-models, found ",
                   stats.in.count, " in and ", stats.out.count, " out"));
}

// Residual standard deviations pooled over all samples (population
// convention), summed in sample order so the result is schedule-independent.
struct PooledStd {
  double in = 0.0;
  double out = 0.0;
};

PooledStd Pool(const std::vector<SampleStats>& stats, double floor) {
  double ss_in = 0.0, ss_out = 0.0;
  size_t n_in = 0, n_out = 0;
  for (const auto& s : stats) {
    ss_in += s.in.sq_dev;
    n_in += s.in.count;
    ss_out += s.out.sq_dev;
    n_out += s.out.count;
  }
  PooledStd pooled;
  pooled.in = n_in > 0 ? std::sqrt(ss_in / static_cast<double>(n_in)) : floor;
  pooled.out =
      n_out > 0 ? std::sqrt(ss_out / static_cast<double>(n_out)) : floor;
  pooled.in = std::max(pooled.in, floor);
  pooled.out = std::max(pooled.out, floor);
  return pooled;
}

GaussianFit Fit(const SideStats& side, VarianceMode variance, double pooled_std,
                double floor) {
  GaussianFit fit;
  fit.mean = side.mean;
  if (variance == VarianceMode::kGlobal) {
    fit.std = pooled_std;
  } else {
    fit.std = std::max(std::sqrt(side.sq_dev / static_cast<double>(side.count)),
                       floor);
  }
  return fit;
}

// log N(x; in) - log N(x; out); the 2*pi terms cancel.
double LogLikelihoodRatio(double x, const GaussianFit& in,
                          const GaussianFit& out) {
  const double zin = (x - in.mean) / in.std;
  const double zout = (x - out.mean) / out.std;
  return std::log(out.std) - std::log(in.std) + 0.5 * (zout * zout - zin * zin);
}

double ScoreSample(const LogitPanel& panel, size_t sample,
                   const SampleStats& stats, const LiraConfig& config,
                   VarianceMode variance, const PooledStd& pooled) {
  const double target = panel.logit(sample, panel.target_index());
  const GaussianFit out =
      Fit(stats.out, variance, pooled.out, config.std_floor);
  if (config.mode == LiraMode::kOffline) {
    return (target - out.mean) / out.std;
  }
  const GaussianFit in = Fit(stats.in, variance, pooled.in, config.std_floor);
  return LogLikelihoodRatio(target, in, out);
}

std::vector<SampleStats> SummarizeAll(const LogitPanel& panel) {
  std::vector<SampleStats> stats(panel.n_samples());
  for (size_t i = 0; i < panel.n_samples(); ++i) {
    stats[i] = SummarizeSample(panel, i);
  }
  return stats;
}

absl::StatusOr<double> ScoreOne(const LogitPanel& panel, size_t sample,
                                const LiraConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (sample >= panel.n_samples()) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample index ", sample, " out of range"));
  }
  const VarianceMode variance = ResolveVarianceMode(panel, config);
  const SampleStats stats = SummarizeSample(panel, sample);
  if (absl::Status s = CheckSample(stats, sample, config.mode, variance);
      !s.ok()) {
    return s;
  }
  PooledStd pooled;
  if (variance == VarianceMode::kGlobal) {
    pooled = Pool(SummarizeAll(panel), config.std_floor);
  }
  return ScoreSample(panel, sample, stats, config, variance, pooled);
}

Metadata LiraMetadata(const LiraConfig& config, VarianceMode variance) {
  return {{"attack", "lira"},
          {"mode", LiraModeName(config.mode)},
          {"variance_mode", VarianceModeName(variance)},
          {"std_floor", FormatDouble(config.std_floor)},
          {"confidence_clamp", FormatDouble(config.confidence_clamp)}};
}

absl::StatusOr<ScoreRecordSet> AssembleRecords(
    const LogitPanel& panel, const std::vector<double>& scores,
    const LiraConfig& config, VarianceMode variance) {
  std::vector<ScoreRecord> records;
  records.reserve(panel.n_samples());
  for (size_t i = 0; i < panel.n_samples(); ++i) {
    records.push_back({absl::StrCat("s", i), scores[i], panel.member(i)});
  }
  return ScoreRecordSet::Create(std::move(records),
                                LiraMetadata(config, variance));
}

absl::Status FirstFailure(const LogitPanel& panel,
                          const std::vector<SampleStats>& stats,
                          const LiraConfig& config, VarianceMode variance) {
  for (size_t i = 0; i < panel.n_samples(); ++i) {
    if (absl::Status s = CheckSample(stats[i], i, config.mode, variance);
        !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status LiraConfig::Validate() const {
  if (!(std_floor > 0.0)) {
    return absl::InvalidArgumentError("std_floor must be positive");
  }
  if (!(confidence_clamp > 0.0 && confidence_clamp < 0.5)) {
    return absl::InvalidArgumentError("confidence_clamp must be in (0, 0.5)");
  }
  return absl::OkStatus();
}

std::string LiraModeName(LiraMode mode) {
  return mode == LiraMode::kOnline ? "online" : "offline";
}

std::string VarianceModeName(VarianceMode mode) {
  return mode == VarianceMode::kPerSample ? "per_sample" : "global";
}

double LogitTransform(double confidence, double clamp) {
  const double p = std::clamp(confidence, clamp, 1.0 - clamp);
  return std::log(p / (1.0 - p));
}

VarianceMode ResolveVarianceMode(const LogitPanel& panel,
                                 const LiraConfig& config) {
  if (config.variance_mode) return *config.variance_mode;
  for (size_t i = 0; i < panel.n_samples(); ++i) {
    const SampleStats stats = SummarizeSample(panel, i);
    if (!CheckSample(stats, i, config.mode, VarianceMode::kPerSample).ok()) {
      return VarianceMode::kGlobal;
    }
  }
  return VarianceMode::kPerSample;
}

absl::StatusOr<double> LiraOnlineScore(const LogitPanel& panel, size_t sample,
                                       const LiraConfig& config) {
  LiraConfig online = config;
  online.mode = LiraMode::kOnline;
  return ScoreOne(panel, sample, online);
}

absl::StatusOr<double> LiraOfflineScore(const LogitPanel& panel, size_t sample,
                                        const LiraConfig& config) {
  LiraConfig offline = config;
  offline.mode = LiraMode::kOffline;
  return ScoreOne(panel, sample, offline);
}

absl::StatusOr<ScoreRecordSet> RunLira(const LogitPanel& panel,
                                       const LiraConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const VarianceMode variance = ResolveVarianceMode(panel, config);
  const auto n = static_cast<std::ptrdiff_t>(panel.n_samples());

  std::vector<SampleStats> stats(panel.n_samples());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    stats[i] = SummarizeSample(panel, static_cast<size_t>(i));
  }
  if (absl::Status s = FirstFailure(panel, stats, config, variance); !s.ok()) {
    return s;
  }
  const PooledStd pooled = Pool(stats, config.std_floor);

  std::vector<double> scores(panel.n_samples());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    scores[i] = ScoreSample(panel, static_cast<size_t>(i), stats[i], config,
                            variance, pooled);
  }
  return AssembleRecords(panel, scores, config, variance);
}

namespace serial {

absl::StatusOr<ScoreRecordSet> RunLira(const LogitPanel& panel,
                                       const LiraConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const VarianceMode variance = ResolveVarianceMode(panel, config);
  const std::vector<SampleStats> stats = SummarizeAll(panel);
  if (absl::Status s = FirstFailure(panel, stats, config, variance); !s.ok()) {
    return s;
  }
  const PooledStd pooled = Pool(stats, config.std_floor);
  std::vector<double> scores(panel.n_samples());
  for (size_t i = 0; i < panel.n_samples(); ++i) {
    scores[i] = ScoreSample(panel, i, stats[i], config, variance, pooled);
  }
  return AssembleRecords(panel, scores, config, variance);
}

}  // namespace serial
}  // namespace privaudit
