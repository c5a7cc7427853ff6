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

#include "privaudit/rmia.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "privaudit/rng.h"
#include "privaudit/roc.h"

namespace privaudit {
namespace {

constexpr size_t kNone = std::numeric_limits<size_t>::max();

// Which column acts as the target and which (if any) is hidden from the
// attacker. Normal scoring uses {target_index, kNone}; surrogate runs during
// tuning promote a shadow to target and hide the real target.
struct Roles {
  size_t target = 0;
  size_t hidden = kNone;
};

Roles DefaultRoles(const LogitPanel& panel) {
  return {panel.target_index(), kNone};
}

std::optional<double> MeanOutProb(const LogitPanel& panel, size_t sample,
                                  Roles roles, double floor) {
  double sum = 0.0;
  size_t count = 0;
  for (size_t j = 0; j < panel.n_models(); ++j) {
    if (j == roles.target || j == roles.hidden || panel.in_model(sample, j)) {
      continue;
    }
    sum += TargetProb(panel, sample, j, floor);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::optional<double> CalibratedRatio(const LogitPanel& panel, size_t sample,
                                      Roles roles, double alpha, double floor) {
  std::optional<double> p_out = MeanOutProb(panel, sample, roles, floor);
  if (!p_out) return std::nullopt;
  const double p_target = TargetProb(panel, sample, roles.target, floor);
  return p_target / InterpolatedMarginal(*p_out, alpha, floor);
}

absl::Status NoOutModels(size_t sample) {
  return absl::FailedPreconditionError(absl::StrCat(
      "sample ", sample, " has no out-models among the shadow columns"));
}

std::vector<size_t> CanaryRows(const LogitPanel& panel,
                               const std::vector<size_t>& population) {
  std::vector<uint8_t> in_population(panel.n_samples(), 0);
  for (size_t z : population) in_population[z] = 1;
  std::vector<size_t> canaries;
  for (size_t i = 0; i < panel.n_samples(); ++i) {
    if (!in_population[i]) canaries.push_back(i);
  }
  return canaries;
}

double FractionAtLeast(double ratio_x, const std::vector<double>& pop_ratios,
                       double gamma) {
  size_t passing = 0;
  for (double rz : pop_ratios) {
    if (ratio_x / rz >= gamma) ++passing;
  }
  return static_cast<double>(passing) / static_cast<double>(pop_ratios.size());
}

// Population ratios for the given roles. Rows without out-models are dropped
// when `skip_missing`, otherwise reported as an error.
absl::StatusOr<std::vector<double>> PopulationRatios(
    const LogitPanel& panel, const std::vector<size_t>& population, Roles roles,
    double alpha, double floor, bool skip_missing) {
  std::vector<double> ratios;
  ratios.reserve(population.size());
  for (size_t z : population) {
    std::optional<double> r = CalibratedRatio(panel, z, roles, alpha, floor);
    if (!r) {
      if (skip_missing) continue;
      return NoOutModels(z);
    }
    ratios.push_back(*r);
  }
  return ratios;
}

// Mean surrogate AUC of one alpha value; nullopt if no surrogate is usable.
std::optional<double> SurrogateAuc(const LogitPanel& panel,
                                   const std::vector<size_t>& canaries,
                                   const std::vector<size_t>& population,
                                   double alpha, const RmiaConfig& config) {
  double total = 0.0;
  size_t used = 0;
  for (size_t shadow = 0; shadow < panel.n_models(); ++shadow) {
    if (shadow == panel.target_index()) continue;
    const Roles roles{shadow, panel.target_index()};
    auto pop = PopulationRatios(panel, population, roles, alpha,
                                config.prob_floor, /*skip_missing=*/true);
    if (!pop.ok() || pop->empty()) continue;
    std::vector<ScoreRecord> records;
    for (size_t x : canaries) {
      std::optional<double> r =
          CalibratedRatio(panel, x, roles, alpha, config.prob_floor);
      if (!r) continue;
      records.push_back({absl::StrCat(x),
                         FractionAtLeast(*r, *pop, config.gamma),
                         panel.in_model(x, shadow)});
    }
    auto set = ScoreRecordSet::Create(std::move(records));
    if (!set.ok() || !set->RequireBothClasses().ok()) continue;
    auto auc = Auc(*set);
    if (!auc.ok()) continue;
    total += *auc;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / static_cast<double>(used);
}

Metadata RmiaMetadata(const RmiaConfig& config, double alpha, bool tuned) {
  return {{"attack", "rmia"},
          {"gamma", FormatDouble(config.gamma)},
          {"alpha", FormatDouble(alpha)},
          {"alpha_autotuned", tuned ? "true" : "false"},
          {"population_size", absl::StrCat(config.population_indices.size())},
          {"prob_floor", FormatDouble(config.prob_floor)}};
}

absl::StatusOr<double> ResolveAlpha(const LogitPanel& panel,
                                    const RmiaConfig& config) {
  if (config.alpha) return *config.alpha;
  return AutotuneAlpha(panel, config.alpha_grid, config);
}

}  // namespace

absl::Status RmiaConfig::Validate(const LogitPanel& panel) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError("gamma must be positive and finite");
  }
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in [0, 1]");
  }
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) {
      return absl::InvalidArgumentError("alpha grid values must lie in [0, 1]");
    }
  }
  if (!(prob_floor > 0.0 && prob_floor < 1.0)) {
    return absl::InvalidArgumentError("prob_floor must lie in (0, 1)");
  }
  if (population_indices.empty()) {
    return absl::InvalidArgumentError("population is empty");
  }
  std::vector<size_t> sorted = population_indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return absl::InvalidArgumentError("population indices repeat");
  }
  if (sorted.back() >= panel.n_samples()) {
    return absl::InvalidArgumentError(
        absl::StrCat("population index ", sorted.back(), " out of range"));
  }
  if (sorted.size() >= panel.n_samples()) {
    return absl::InvalidArgumentError(
        "population covers every row; nothing left to score");
  }
  return absl::OkStatus();
}

double TargetProb(const LogitPanel& panel, size_t sample, size_t model,
                  double prob_floor) {
  const double p = 1.0 / (1.0 + std::exp(-panel.logit(sample, model)));
  return std::max(p, prob_floor);
}

absl::StatusOr<double> AverageOutProb(const LogitPanel& panel, size_t sample,
                                      double prob_floor) {
  if (sample >= panel.n_samples()) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample index ", sample, " out of range"));
  }
  std::optional<double> p =
      MeanOutProb(panel, sample, DefaultRoles(panel), prob_floor);
  if (!p) return NoOutModels(sample);
  return *p;
}

double InterpolatedMarginal(double p_out, double alpha, double prob_floor) {
  const double marginal = ((1.0 + alpha) * p_out + (1.0 - alpha)) / 2.0;
  return std::clamp(marginal, prob_floor, 1.0);
}

absl::StatusOr<double> PairwiseRatio(const LogitPanel& panel, size_t x,
                                     size_t z, double alpha,
                                     double prob_floor) {
  if (x >= panel.n_samples() || z >= panel.n_samples()) {
    return absl::InvalidArgumentError("sample index out of range");
  }
  const Roles roles = DefaultRoles(panel);
  std::optional<double> rx =
      CalibratedRatio(panel, x, roles, alpha, prob_floor);
  if (!rx) return NoOutModels(x);
  std::optional<double> rz =
      CalibratedRatio(panel, z, roles, alpha, prob_floor);
  if (!rz) return NoOutModels(z);
  return *rx / *rz;
}

absl::StatusOr<double> RmiaScore(const LogitPanel& panel, size_t x,
                                 const RmiaConfig& config) {
  if (config.population_indices.empty()) {
    return absl::InvalidArgumentError("population is empty");
  }
  if (!config.alpha) {
    return absl::InvalidArgumentError("RmiaScore needs a fixed alpha");
  }
  if (x >= panel.n_samples()) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample index ", x, " out of range"));
  }
  const Roles roles = DefaultRoles(panel);
  std::optional<double> rx =
      CalibratedRatio(panel, x, roles, *config.alpha, config.prob_floor);
  if (!rx) return NoOutModels(x);
  auto pop = PopulationRatios(panel, config.population_indices, roles,
                              *config.alpha, config.prob_floor,
                              /*skip_missing=*/false);
  if (!pop.ok()) return pop.status();
  return FractionAtLeast(*rx, *pop, config.gamma);
}

absl::StatusOr<double> AutotuneAlpha(const LogitPanel& panel,
                                     const std::vector<double>& candidate_grid,
                                     const RmiaConfig& config) {
  if (candidate_grid.empty()) {
    return absl::InvalidArgumentError("alpha grid is empty");
  }
  if (panel.n_models() < 3) {
    return absl::FailedPreconditionError(
        "alpha auto-tuning needs >= 2 shadow models (one surrogate target "
        "plus one shadow)");
  }
  if (config.population_indices.empty()) {
    return absl::InvalidArgumentError("population is empty");
  }
  std::vector<double> grid = candidate_grid;
  std::sort(grid.begin(), grid.end());
  const std::vector<size_t> canaries =
      CanaryRows(panel, config.population_indices);

  std::optional<double> best_alpha;
  double best_auc = -1.0;
  for (double alpha : grid) {
    std::optional<double> auc =
        SurrogateAuc(panel, canaries, config.population_indices, alpha, config);
    // Strict improvement only, so ties keep the smaller alpha.
    if (auc && *auc > best_auc) {
      best_auc = *auc;
      best_alpha = alpha;
    }
  }
  if (!best_alpha) {
    return absl::FailedPreconditionError(
        "no shadow model yields a usable surrogate (need out-models and both "
        "membership classes)");
  }
  return *best_alpha;
}

absl::StatusOr<std::vector<size_t>> SamplePopulation(size_t n_samples,
                                                     size_t count,
                                                     uint64_t seed) {
  if (count == 0 || count >= n_samples) {
    return absl::InvalidArgumentError(
        absl::StrCat("population size must be in [1, ", n_samples, ")"));
  }
  std::vector<size_t> rows(n_samples);
  std::iota(rows.begin(), rows.end(), size_t{0});
  std::mt19937_64 rng = MakeRng(seed, /*stream=*/0x9a9);
  // Partial Fisher-Yates: without replacement.
  for (size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<size_t> pick(i, n_samples - 1);
    std::swap(rows[i], rows[pick(rng)]);
  }
  rows.resize(count);
  std::sort(rows.begin(), rows.end());
  return rows;
}

absl::StatusOr<ScoreRecordSet> RunRmia(const LogitPanel& panel,
                                       const RmiaConfig& config) {
  if (absl::Status s = config.Validate(panel); !s.ok()) return s;
  auto alpha = ResolveAlpha(panel, config);
  if (!alpha.ok()) return alpha.status();

  const Roles roles = DefaultRoles(panel);
  auto pop = PopulationRatios(panel, config.population_indices, roles, *alpha,
                              config.prob_floor, /*skip_missing=*/false);
  if (!pop.ok()) return pop.status();
  const std::vector<size_t> canaries =
      CanaryRows(panel, config.population_indices);
  for (size_t x : canaries) {
    if (!MeanOutProb(panel, x, roles, config.prob_floor)) return NoOutModels(x);
  }

  const auto n = static_cast<std::ptrdiff_t>(canaries.size());
  std::vector<double> scores(canaries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double rx =
        *CalibratedRatio(panel, canaries[i], roles, *alpha, config.prob_floor);
    scores[i] = FractionAtLeast(rx, *pop, config.gamma);
  }

  std::vector<ScoreRecord> records;
  records.reserve(canaries.size());
  for (size_t i = 0; i < canaries.size(); ++i) {
    records.push_back(
        {absl::StrCat("s", canaries[i]), scores[i], panel.member(canaries[i])});
  }
  return ScoreRecordSet::Create(std::move(records),
                                RmiaMetadata(config, *alpha, !config.alpha));
}

namespace serial {

absl::StatusOr<ScoreRecordSet> RunRmia(const LogitPanel& panel,
                                       const RmiaConfig& config) {
  if (absl::Status s = config.Validate(panel); !s.ok()) return s;
  auto alpha = ResolveAlpha(panel, config);
  if (!alpha.ok()) return alpha.status();
  std::vector<ScoreRecord> records;
  for (size_t x : CanaryRows(panel, config.population_indices)) {
    size_t passing = 0;
    for (size_t z : config.population_indices) {
      auto l = PairwiseRatio(panel, x, z, *alpha, config.prob_floor);
      if (!l.ok()) return l.status();
      if (*l >= config.gamma) ++passing;
    }
    records.push_back(
        {absl::StrCat("s", x),
         static_cast<double>(passing) /
             static_cast<double>(config.population_indices.size()),
         panel.member(x)});
  }
  return ScoreRecordSet::Create(std::move(records),
                                RmiaMetadata(config, *alpha, !config.alpha));
}

}  // namespace serial
}  // namespace privaudit
