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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "boost/math/special_functions/beta.hpp"

namespace privaudit {
namespace {

constexpr double kBisectionTolerance = 1e-4;
// exp() overflows past ~709; no realistic summary needs more.
constexpr double kMaxEpsilon = 700.0;

// Complement of e^eps / (e^eps + 1), computed without cancellation.
double WrongGuessProb(double epsilon) {
  return 1.0 / (1.0 + std::exp(epsilon));
}

// Pr[X >= c] with the success probability given through its complement.
double TailFromComplement(size_t n, double q, size_t c) {
  if (c == 0) return 1.0;
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;
  // Pr[X >= c] = I_p(c, n-c+1) = 1 - I_q(n-c+1, c).
  return boost::math::ibetac(static_cast<double>(n - c + 1),
                             static_cast<double>(c), q);
}

}  // namespace

double BinomialTail(size_t n, double p, size_t c) {
  if (c == 0) return 1.0;
  if (c > n) return 0.0;
  return TailFromComplement(n, 1.0 - p, c);
}

absl::StatusOr<double> BinomialGuessBound::EpsilonLowerBound(
    const GuessSummary& summary, double delta, double significance) const {
  if (absl::Status s = summary.Validate(); !s.ok()) return s;
  if (!(significance > 0.0 && significance <= 0.5)) {
    return absl::InvalidArgumentError("significance must lie in (0, 0.5]");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  const double slack = static_cast<double>(summary.m) * delta;
  auto rejected = [&](double eps) {
    return TailFromComplement(summary.c_hat, WrongGuessProb(eps), summary.c) +
               slack <
           significance;
  };
  if (!rejected(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (rejected(hi)) {
    lo = hi;
    if (hi >= kMaxEpsilon) return kMaxEpsilon;
    hi = std::min(2.0 * hi, kMaxEpsilon);
  }
  while (hi - lo > kBisectionTolerance) {
    const double mid = 0.5 * (lo + hi);
    (rejected(mid) ? lo : hi) = mid;
  }
  return lo;
}

double EpsilonLowerBound(const GuessSummary& summary, double delta,
                         double significance) {
  auto eps =
      BinomialGuessBound().EpsilonLowerBound(summary, delta, significance);
  return eps.ok() ? *eps : 0.0;
}

std::string BoundKindName(BoundKind kind) {
  return kind == BoundKind::kBinomial ? "binomial" : "fdp_plugin";
}

std::string GuessStrategyName(GuessStrategy strategy) {
  return strategy == GuessStrategy::kOneSided ? "one_sided" : "two_sided";
}

absl::StatusOr<GuessStrategy> ParseGuessStrategy(const std::string& name) {
  if (name == "one_sided" || name == "one-sided") {
    return GuessStrategy::kOneSided;
  }
  if (name == "two_sided" || name == "two-sided") {
    return GuessStrategy::kTwoSided;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown guessing strategy '", name, "'"));
}

absl::Status GuessAuditConfig::Validate() const {
  if (!(significance > 0.0 && significance <= 0.5)) {
    return absl::InvalidArgumentError("significance must lie in (0, 0.5]");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  if (grid_min < 1) return absl::InvalidArgumentError("grid_min must be >= 1");
  if (grid_points < 1) {
    return absl::InvalidArgumentError("grid_points must be >= 1");
  }
  if (bound == BoundKind::kFdpPlugin && plugin == nullptr) {
    return absl::FailedPreconditionError(
        "bound fdp_plugin selected but no plugin is registered");
  }
  return absl::OkStatus();
}

absl::StatusOr<GuessSummary> MakeGuesses(const ScoreRecordSet& set,
                                         size_t c_hat, GuessStrategy strategy) {
  if (strategy == GuessStrategy::kTwoSided) c_hat -= c_hat % 2;
  if (c_hat == 0) {
    return absl::InvalidArgumentError("c_hat must be positive");
  }
  if (c_hat > set.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("c_hat=", c_hat, " exceeds m=", set.size()));
  }
  const auto& records = set.records();
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (records[a].score != records[b].score) {
      return records[a].score > records[b].score;
    }
    return records[a].sample_id < records[b].sample_id;
  });

  GuessSummary summary{set.size(), c_hat, 0, strategy};
  const size_t top = strategy == GuessStrategy::kOneSided ? c_hat : c_hat / 2;
  for (size_t i = 0; i < top; ++i) {
    if (records[order[i]].member) ++summary.c;
  }
  if (strategy == GuessStrategy::kTwoSided) {
    for (size_t i = order.size() - c_hat / 2; i < order.size(); ++i) {
      if (!records[order[i]].member) ++summary.c;
    }
  }
  return summary;
}

std::vector<size_t> GuessGrid(size_t grid_min, size_t m, size_t grid_points) {
  std::vector<size_t> grid;
  if (grid_min < 1 || grid_min > m || grid_points == 0) return grid;
  if (grid_points == 1) return {grid_min};
  const double ratio = std::log(static_cast<double>(m) / grid_min);
  for (size_t i = 0; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / (grid_points - 1);
    auto v = static_cast<size_t>(std::llround(grid_min * std::exp(ratio * t)));
    grid.push_back(std::clamp(v, grid_min, m));
  }
  grid.back() = m;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

absl::StatusOr<SweepResult> Sweep(const ScoreRecordSet& set,
                                  const GuessAuditConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const std::vector<size_t> grid =
      GuessGrid(config.grid_min, set.size(), config.grid_points);
  std::vector<GuessStrategy> strategies = config.strategies;
  if (strategies.empty()) {
    strategies = {GuessStrategy::kOneSided, GuessStrategy::kTwoSided};
  }

  std::vector<SweepRow> rows;
  for (GuessStrategy strategy : strategies) {
    size_t previous = 0;
    for (size_t c_hat : grid) {
      if (strategy == GuessStrategy::kTwoSided) c_hat -= c_hat % 2;
      if (c_hat == 0 || c_hat == previous) continue;
      previous = c_hat;
      auto summary = MakeGuesses(set, c_hat, strategy);
      if (!summary.ok()) return summary.status();
      rows.push_back({*summary, 0.0});
    }
  }
  if (rows.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("empty guess grid: grid_min=", config.grid_min,
                     " exceeds m=", set.size()));
  }

  BinomialGuessBound binomial;
  const GuessBound* active =
      config.bound == BoundKind::kBinomial ? &binomial : config.plugin.get();
  SweepResult result;
  result.bound_name = active->name();
  result.row_significance =
      config.bonferroni ? config.significance / static_cast<double>(rows.size())
                        : config.significance;

  std::vector<absl::Status> errors(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto eps = active->EpsilonLowerBound(rows[i].summary, config.delta,
                                         result.row_significance);
    if (eps.ok()) {
      rows[i].epsilon = *eps;
    } else {
      errors[i] = eps.status();
    }
  }
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  result.best = rows.front();
  for (const SweepRow& row : rows) {
    if (row.epsilon > result.best.epsilon) result.best = row;
  }
  result.table = std::move(rows);
  return result;
}

std::string SweepCsv(const SweepResult& result) {
  std::string out = "strategy,c_hat,c,epsilon\n";
  for (const SweepRow& row : result.table) {
    absl::StrAppend(&out, GuessStrategyName(row.summary.strategy), ",",
                    row.summary.c_hat, ",", row.summary.c, ",",
                    FormatDouble(row.epsilon), "\n");
  }
  return out;
}

}  // namespace privaudit
