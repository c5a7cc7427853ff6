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

// Discoverable and (n, p)-discoverable extraction over token traces.
//
// A trace records, for every position of a target continuation z, the raw
// next-token distribution (truncated, sorted) and where the target token sits
// in it. p_z is the probability that one sampled continuation equals z under
// a decoding scheme.

#ifndef PRIVAUDIT_EXTRACTION_H_
#define PRIVAUDIT_EXTRACTION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privaudit/observation.h"

namespace privaudit {

struct SamplingScheme {
  enum class Kind { kGreedy, kTemperature, kTopK, kTopP };
  Kind kind = Kind::kGreedy;
  double temperature = 1.0;  // kTemperature
  size_t k = 0;              // kTopK
  double p = 1.0;            // kTopP

  static SamplingScheme Greedy() { return {}; }
  static SamplingScheme Temperature(double t) {
    return {Kind::kTemperature, t, 0, 1.0};
  }
  static SamplingScheme TopK(size_t k) { return {Kind::kTopK, 1.0, k, 1.0}; }
  static SamplingScheme TopP(double p) { return {Kind::kTopP, 1.0, 0, p}; }

  // "greedy", "temperature:T", "top_k:K" or "top_p:P".
  static absl::StatusOr<SamplingScheme> Parse(const std::string& text);
  std::string Label() const;
  absl::Status Validate() const;
};

struct MatchPredicate {
  enum class Kind { kExact, kInclusion, kLcs };
  Kind kind = Kind::kExact;
  double tau = 1.0;  // kLcs only

  // "exact", "inclusion" or "lcs:TAU".
  static absl::StatusOr<MatchPredicate> Parse(const std::string& text);
  std::string Label() const;
  absl::Status Validate() const;
};

// Effective probability of the target token at one step. `lower` is a
// guaranteed lower bound accounting for the truncated tail; `value` is the
// renormalization over the recorded list. They coincide when the list holds
// the full distribution.
struct StepProb {
  double value = 0.0;
  double lower = 0.0;
};

// Fails with FailedPrecondition when the truncated list cannot resolve
// nucleus membership.
absl::StatusOr<StepProb> EffectiveStepProb(
    const TraceStep& step, const SamplingScheme& scheme,
    std::optional<size_t> vocab_size = std::nullopt);

struct PzResult {
  double pz = 0.0;
  // -inf when pz == 0.
  double log_pz = 0.0;
  double pz_lower = 0.0;
};

// Product of effective step probabilities, accumulated in log space.
absl::StatusOr<PzResult> ComputePz(const TokenTrace& trace,
                                   const SamplingScheme& scheme);

// 1 - (1 - pz)^n. n == 1 returns pz exactly.
double NpProbability(double pz, uint64_t n);

// Smallest n with NpProbability(pz, n) >= p, as a double; +inf when pz == 0.
double NForTarget(double pz, double p);

// Length of the longest common subsequence.
size_t Lcs(const std::vector<int64_t>& a, const std::vector<int64_t>& b);

// Token sequences must be nonempty.
absl::StatusOr<bool> Match(const CompletionRecord& record,
                           const MatchPredicate& predicate);

struct RateRow {
  std::string scheme;
  // Over completions produced under this scheme; empty without completions.
  size_t completions = 0;
  std::map<std::string, double> match_rates;
  // Over traces; empty without traces.
  size_t traces = 0;
  std::map<double, double> pz_rates;  // threshold -> fraction with pz > it
  double mean_pz = 0.0;
  // Largest pz - pz_lower over the traces.
  double max_truncation_error = 0.0;
};

struct RateTable {
  std::vector<double> pz_thresholds;
  std::vector<std::string> predicates;
  std::vector<RateRow> rows;
};

absl::StatusOr<RateTable> ExtractionRates(
    const std::vector<TokenTrace>& traces,
    const std::vector<CompletionRecord>& completions,
    const std::vector<SamplingScheme>& schemes,
    const std::vector<MatchPredicate>& predicates,
    const std::vector<double>& pz_thresholds);

struct NpPoint {
  uint64_t n = 0;
  double p = 0.0;
  double fraction = 0.0;
};

// Fraction of pz_values with NpProbability(pz, n) >= p, for every (n, p).
absl::StatusOr<std::vector<NpPoint>> NpCurve(
    const std::vector<double>& pz_values, const std::vector<uint64_t>& n_grid,
    const std::vector<double>& p_targets);

// CSV with header "n,p,fraction".
std::string NpCurveCsv(const std::vector<NpPoint>& curve);

// p_z of every trace under `scheme`, OpenMP-parallel over traces.
absl::StatusOr<std::vector<PzResult>> ComputePzBatch(
    const std::vector<TokenTrace>& traces, const SamplingScheme& scheme);

namespace serial {
// Multiplies probabilities directly instead of summing logs.
absl::StatusOr<std::vector<PzResult>> ComputePzBatch(
    const std::vector<TokenTrace>& traces, const SamplingScheme& scheme);
}  // namespace serial

}  // namespace privaudit

#endif  // PRIVAUDIT_EXTRACTION_H_
