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

// One-run guess-count auditing.
//
// An adversary guesses membership for c_hat canaries and is right c times.
// Under epsilon-DP with m canaries, c is stochastically dominated by
// Binomial(c_hat, e^eps / (e^eps + 1)), so a small upper tail rejects eps.

#ifndef PRIVAUDIT_GUESS_AUDIT_H_
#define PRIVAUDIT_GUESS_AUDIT_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privaudit/observation.h"

namespace privaudit {

// Pr[X >= c] for X ~ Binomial(n, p). Requires c <= n and p in [0, 1].
double BinomialTail(size_t n, double p, size_t c);

// Converts a guess summary into an epsilon lower bound.
class GuessBound {
 public:
  virtual ~GuessBound() = default;
  virtual std::string name() const = 0;
  // Largest epsilon rejected at level `significance`, or 0.
  virtual absl::StatusOr<double> EpsilonLowerBound(
      const GuessSummary& summary, double delta, double significance) const = 0;
};

// sup{eps >= 0 : BinomialTail(c_hat, e^eps/(e^eps+1), c) + m * delta <
// significance}, by bisection to 1e-4. The returned value is the rejected
// end of the final bracket.
class BinomialGuessBound : public GuessBound {
 public:
  std::string name() const override { return "binomial"; }
  absl::StatusOr<double> EpsilonLowerBound(const GuessSummary& summary,
                                           double delta,
                                           double significance) const override;
};

enum class BoundKind { kBinomial, kFdpPlugin };

std::string BoundKindName(BoundKind kind);
std::string GuessStrategyName(GuessStrategy strategy);
absl::StatusOr<GuessStrategy> ParseGuessStrategy(const std::string& name);

struct GuessAuditConfig {
  double delta = 0.0;
  double significance = 0.05;
  size_t grid_min = 10;
  size_t grid_points = 20;
  BoundKind bound = BoundKind::kBinomial;
  // Required when bound == kFdpPlugin.
  std::shared_ptr<const GuessBound> plugin;
  // Divide `significance` by the number of sweep rows, so the reported
  // maximum keeps its level.
  bool bonferroni = true;
  // Empty means both strategies.
  std::vector<GuessStrategy> strategies;

  absl::Status Validate() const;
};

double EpsilonLowerBound(const GuessSummary& summary, double delta,
                         double significance);

// Guesses "member" on the top c_hat scores (one-sided) or "member" on the top
// c_hat/2 and "non-member" on the bottom c_hat/2 (two-sided; odd c_hat is
// rounded down). Order is score descending, then sample_id ascending.
absl::StatusOr<GuessSummary> MakeGuesses(const ScoreRecordSet& set,
                                         size_t c_hat, GuessStrategy strategy);

// grid_points log-spaced integers from grid_min to m, deduplicated.
std::vector<size_t> GuessGrid(size_t grid_min, size_t m, size_t grid_points);

struct SweepRow {
  GuessSummary summary;
  double epsilon = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> table;
  SweepRow best;
  std::string bound_name;
  // Per-row level actually used.
  double row_significance = 0.0;
};

// Rows are ordered by strategy (one-sided first), then c_hat ascending.
// The best row is the first with the largest epsilon.
absl::StatusOr<SweepResult> Sweep(const ScoreRecordSet& set,
                                  const GuessAuditConfig& config);

// CSV with header "strategy,c_hat,c,epsilon".
std::string SweepCsv(const SweepResult& result);

}  // namespace privaudit

#endif  // PRIVAUDIT_GUESS_AUDIT_H_
