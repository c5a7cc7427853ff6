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

#include "privaudit/bootstrap.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "privaudit/rng.h"
#include "privaudit/roc.h"

namespace privaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-record multiplicities for round `round`.
std::vector<uint32_t> DrawWeights(size_t m, const BootstrapConfig& config,
                                  uint64_t round) {
  std::mt19937_64 rng = MakeRng(config.seed, round);
  std::vector<uint32_t> weights(m, 0);
  if (config.resampling == Resampling::kWithReplacement) {
    std::uniform_int_distribution<size_t> pick(0, m - 1);
    for (size_t i = 0; i < m; ++i) ++weights[pick(rng)];
  } else {
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t i = 0; i < m; ++i) ++weights[order[i]];
  }
  return weights;
}

// Precomputed full-data structure shared by all rounds.
struct Kernel {
  ScoreLadder ladder;
  std::vector<size_t> rung_of_record;
  std::vector<size_t> rung_of_threshold;
};

absl::StatusOr<Kernel> BuildKernel(const ScoreRecordSet& set,
                                   const std::vector<double>& thresholds) {
  auto ladder = ScoreLadder::Build(set);
  if (!ladder.ok()) return ladder.status();
  Kernel kernel{std::move(*ladder), {}, {}};
  kernel.rung_of_record.reserve(set.size());
  for (const auto& r : set.records()) {
    kernel.rung_of_record.push_back(kernel.ladder.FirstAtLeast(r.score));
  }
  for (double tau : thresholds) {
    kernel.rung_of_threshold.push_back(kernel.ladder.FirstAtLeast(tau));
  }
  return kernel;
}

RoundMetrics EvaluateRound(const ScoreRecordSet& set, const Kernel& kernel,
                           const std::vector<uint32_t>& weights, double delta) {
  const size_t g = kernel.ladder.size();
  std::vector<uint64_t> mem(g, 0), non(g, 0);
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0) continue;
    (set.records()[i].member ? mem : non)[kernel.rung_of_record[i]] +=
        weights[i];
  }
  std::vector<uint64_t> mem_ge(g + 1, 0), non_ge(g + 1, 0);
  for (size_t i = g; i-- > 0;) {
    mem_ge[i] = mem_ge[i + 1] + mem[i];
    non_ge[i] = non_ge[i + 1] + non[i];
  }
  const uint64_t p = mem_ge[0], n = non_ge[0];

  RoundMetrics metrics;
  uint64_t best_correct = n;
  for (size_t i = 0; i < g; ++i) {
    best_correct = std::max(best_correct, mem_ge[i] + (n - non_ge[i]));
  }
  metrics.accuracy =
      static_cast<double>(best_correct) / static_cast<double>(p + n);
  if (p == 0 || n == 0) return metrics;

  uint64_t twice_u = 0, non_below = 0;
  for (size_t i = 0; i < g; ++i) {
    twice_u += mem[i] * (2 * non_below + non[i]);
    non_below += non[i];
  }
  metrics.auc = static_cast<double>(twice_u) /
                (2.0 * static_cast<double>(p) * static_cast<double>(n));

  const double pd = static_cast<double>(p), nd = static_cast<double>(n);
  metrics.epsilons.reserve(kernel.rung_of_threshold.size());
  for (size_t rung : kernel.rung_of_threshold) {
    RatePoint rates;
    rates.tpr = static_cast<double>(mem_ge[rung]) / pd;
    rates.fnr = static_cast<double>(p - mem_ge[rung]) / pd;
    rates.fpr = static_cast<double>(non_ge[rung]) / nd;
    rates.tnr = static_cast<double>(n - non_ge[rung]) / nd;
    metrics.epsilons.push_back(EpsilonAtThreshold(rates, delta).epsilon);
  }
  return metrics;
}

double Lerp(double lo, double hi, double frac) {
  if (frac == 0.0 || lo == hi) return lo;
  if (std::isinf(lo) && std::isinf(hi)) return frac < 0.5 ? lo : hi;
  if (std::isinf(lo)) return lo;
  if (std::isinf(hi)) return hi;
  return lo + (hi - lo) * frac;
}

double Quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return Lerp(sorted[lo], sorted[hi], h - static_cast<double>(lo));
}

IntervalReport MakeReport(std::string metric, double point,
                          const Interval& interval, size_t used) {
  return {std::move(metric), point, interval.lower, interval.upper, used};
}

}  // namespace

std::string ResamplingName(Resampling resampling) {
  return resampling == Resampling::kWithReplacement ? "with_replacement"
                                                    : "without_replacement";
}

absl::Status BootstrapConfig::Validate() const {
  if (k < 2) return absl::InvalidArgumentError("bootstrap needs k >= 2");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<RoundMetrics>> BootstrapRounds(
    const ScoreRecordSet& set, const std::vector<double>& thresholds,
    const BootstrapConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  auto kernel = BuildKernel(set, thresholds);
  if (!kernel.ok()) return kernel.status();
  std::vector<RoundMetrics> rounds(config.k);
  const auto k = static_cast<std::ptrdiff_t>(config.k);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t r = 0; r < k; ++r) {
    const std::vector<uint32_t> weights =
        DrawWeights(set.size(), config, static_cast<uint64_t>(r));
    rounds[r] = EvaluateRound(set, *kernel, weights, config.delta);
  }
  return rounds;
}

absl::StatusOr<Interval> PercentileInterval(std::vector<double> values,
                                            double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  for (double v : values) {
    if (std::isnan(v)) {
      return absl::InvalidArgumentError("interval values contain NaN");
    }
  }
  if (values.size() < 2) {
    return absl::FailedPreconditionError(
        absl::StrCat("interval needs >= 2 values, got ", values.size()));
  }
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - confidence) / 2.0;
  return Interval{Quantile(values, tail), Quantile(values, 1.0 - tail)};
}

absl::StatusOr<FinalEpsilon> FinalEmpiricalEpsilon(
    const std::vector<std::pair<double, Interval>>& per_threshold) {
  if (per_threshold.empty()) {
    return absl::InvalidArgumentError("no thresholds to choose from");
  }
  FinalEpsilon result;
  bool have_upper = false;
  for (const auto& [tau, interval] : per_threshold) {
    if (std::isfinite(interval.upper)) {
      if (!have_upper || interval.upper > result.upper_rule.epsilon ||
          (interval.upper == result.upper_rule.epsilon &&
           tau < result.upper_rule.threshold)) {
        result.upper_rule = {tau, interval.upper};
        have_upper = true;
      }
    } else {
      ++result.excluded;
    }
    if (std::isfinite(interval.lower) &&
        (!result.lower_rule || interval.lower > result.lower_rule->epsilon ||
         (interval.lower == result.lower_rule->epsilon &&
          tau < result.lower_rule->threshold))) {
      result.lower_rule = EpsilonChoice{tau, interval.lower};
    }
  }
  if (!have_upper) {
    return absl::FailedPreconditionError(
        "every threshold has an infinite or absent interval upper bound");
  }
  return result;
}

absl::StatusOr<BootstrapAudit> RunBootstrapAudit(
    const ScoreRecordSet& set, const BootstrapConfig& config,
    std::optional<double> tpr_target) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (absl::Status s = set.RequireBothClasses(); !s.ok()) return s;

  BootstrapAudit audit;
  audit.config = config;
  audit.m = set.size();
  auto grid = ThresholdGrid(set);
  if (!grid.ok()) return grid.status();
  audit.thresholds = *grid;

  std::vector<double> evaluated = audit.thresholds;
  if (tpr_target) {
    auto tau = ThresholdAtTpr(set, *tpr_target);
    if (!tau.ok()) return tau.status();
    evaluated.push_back(*tau);
    audit.tpr_target = tpr_target;
  }
  auto rounds = BootstrapRounds(set, evaluated, config);
  if (!rounds.ok()) return rounds.status();

  std::vector<double> aucs, accuracies;
  std::vector<std::vector<double>> eps(evaluated.size());
  for (const RoundMetrics& round : *rounds) {
    accuracies.push_back(round.accuracy);
    if (round.degenerate()) {
      ++audit.degenerate_rounds;
      continue;
    }
    aucs.push_back(*round.auc);
    for (size_t t = 0; t < evaluated.size(); ++t) {
      eps[t].push_back(round.epsilons[t]);
    }
  }
  if (audit.degenerate_rounds > 0) {
    audit.warnings.push_back(absl::StrCat(
        audit.degenerate_rounds, " of ", config.k,
        " bootstrap rounds lost a class; their AUC and epsilon values were "
        "excluded"));
  }
  if (config.resampling == Resampling::kWithoutReplacement) {
    audit.warnings.push_back(
        "without_replacement resampling draws all m records once; "
        "every round equals the original set and intervals have zero width");
  }

  auto auc_point = Auc(set);
  if (!auc_point.ok()) return auc_point.status();
  auto auc_interval = PercentileInterval(aucs, config.confidence);
  if (!auc_interval.ok()) return auc_interval.status();
  audit.auc = MakeReport("auc", *auc_point, *auc_interval, aucs.size());

  auto best = BestAccuracy(set);
  if (!best.ok()) return best.status();
  auto acc_interval = PercentileInterval(accuracies, config.confidence);
  if (!acc_interval.ok()) return acc_interval.status();
  audit.accuracy =
      MakeReport("accuracy", best->accuracy, *acc_interval, accuracies.size());

  auto point_epsilon = [&](double tau) -> absl::StatusOr<double> {
    auto rates = RatesAtThreshold(set, tau);
    if (!rates.ok()) return rates.status();
    return EpsilonAtThreshold(*rates, config.delta).epsilon;
  };

  std::vector<std::pair<double, Interval>> per_threshold;
  for (size_t t = 0; t < audit.thresholds.size(); ++t) {
    const double tau = audit.thresholds[t];
    auto interval = PercentileInterval(eps[t], config.confidence);
    if (!interval.ok()) {
      audit.epsilon_by_threshold.push_back(std::nullopt);
      continue;
    }
    auto point = point_epsilon(tau);
    if (!point.ok()) return point.status();
    audit.epsilon_by_threshold.push_back(
        MakeReport(absl::StrCat("epsilon@", FormatExtended(tau)), *point,
                   *interval, eps[t].size()));
    per_threshold.emplace_back(tau, *interval);
  }
  auto final_eps = FinalEmpiricalEpsilon(per_threshold);
  if (!final_eps.ok()) return final_eps.status();
  audit.final_epsilon = *final_eps;
  if (final_eps->excluded > 0) {
    audit.warnings.push_back(absl::StrCat(
        final_eps->excluded,
        " thresholds had an infinite interval upper bound and were excluded "
        "from the final epsilon"));
  }

  if (tpr_target) {
    const double tau = evaluated.back();
    auto interval = PercentileInterval(eps.back(), config.confidence);
    if (interval.ok()) {
      auto point = point_epsilon(tau);
      if (!point.ok()) return point.status();
      audit.epsilon_at_tpr =
          MakeReport(absl::StrCat("epsilon@tpr=", FormatDouble(*tpr_target)),
                     *point, *interval, eps.back().size());
    } else {
      audit.warnings.push_back("epsilon at the TPR target has no interval: " +
                               std::string(interval.status().message()));
    }
  }
  return audit;
}

namespace serial {

absl::StatusOr<std::vector<RoundMetrics>> BootstrapRounds(
    const ScoreRecordSet& set, const std::vector<double>& thresholds,
    const BootstrapConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (set.empty()) return absl::InvalidArgumentError("score set is empty");
  std::vector<RoundMetrics> rounds;
  rounds.reserve(config.k);
  for (size_t r = 0; r < config.k; ++r) {
    const std::vector<uint32_t> weights = DrawWeights(set.size(), config, r);
    std::vector<ScoreRecord> resample;
    for (size_t i = 0; i < weights.size(); ++i) {
      for (uint32_t c = 0; c < weights[i]; ++c) {
        resample.push_back({absl::StrCat(resample.size()),
                            set.records()[i].score, set.records()[i].member});
      }
    }
    auto round_set = ScoreRecordSet::Create(std::move(resample));
    if (!round_set.ok()) return round_set.status();
    RoundMetrics metrics;
    auto best = BestAccuracy(*round_set);
    if (!best.ok()) return best.status();
    metrics.accuracy = best->accuracy;
    if (round_set->RequireBothClasses().ok()) {
      auto auc = Auc(*round_set);
      if (!auc.ok()) return auc.status();
      metrics.auc = *auc;
      for (double tau : thresholds) {
        auto rates = RatesAtThreshold(*round_set, tau);
        if (!rates.ok()) return rates.status();
        metrics.epsilons.push_back(
            EpsilonAtThreshold(*rates, config.delta).epsilon);
      }
    }
    rounds.push_back(std::move(metrics));
  }
  return rounds;
}

}  // namespace serial
}  // namespace privaudit
