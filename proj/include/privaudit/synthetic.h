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

// Seeded generators with analytically known ground truth.
//
// Every generator is a pure function of its arguments. Streams come from
// std::mt19937_64 seeded through DeriveSeed, and values are drawn with the
// standard library distributions, whose algorithms are implementation-defined.
// Share fixtures as files rather than relying on matching streams.

#ifndef PRIVAUDIT_SYNTHETIC_H_
#define PRIVAUDIT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privaudit/extraction.h"
#include "privaudit/observation.h"

namespace privaudit {

double NormalCdf(double x);

// Phi(shift / (sigma * sqrt(2))).
double ShiftedGaussianAuc(double shift, double sigma);

struct GaussianPairSpec {
  size_t m_per_class = 1000;
  double shift = 2.0;
  double sigma = 1.0;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

// Members ~ N(shift, sigma^2), non-members ~ N(0, sigma^2). Record order is
// shuffled so sample ids carry no membership signal.
absl::StatusOr<ScoreRecordSet> GenShiftedGaussianScores(
    const GaussianPairSpec& spec);

// Membership ~ Bernoulli(1/2); score equals the membership bit with
// probability e^eps0 / (e^eps0 + 1), else its flip. eps0 may be +inf.
absl::StatusOr<ScoreRecordSet> GenRandomizedResponseGuesses(size_t m,
                                                            double epsilon0,
                                                            uint64_t seed);

// delta(eps) = Phi(-eps/mu + mu/2) - e^eps * Phi(-eps/mu - mu/2).
double GaussianMechanismDelta(double mu, double epsilon);
// Smallest eps >= 0 with GaussianMechanismDelta(mu, eps) <= delta.
double GaussianMechanismEpsilon(double mu, double delta);

// m records, floor(m/2) members ~ N(mu, 1) and the rest ~ N(0, 1), with
// mu = 1 / sigma_noise. Metadata carries the analytic epsilon at `delta`.
absl::StatusOr<ScoreRecordSet> GenGaussianMechanismScores(size_t m,
                                                          double sigma_noise,
                                                          double delta,
                                                          uint64_t seed);

// Column 0 is the target model and defines true membership. Each cell is "in"
// with probability 1/2; with n_models >= 3, shadow columns are redrawn per row
// until each sample has at least one in- and one out-shadow.
absl::StatusOr<LogitPanel> GenLogitPanel(size_t n_samples, size_t n_models,
                                         double mu_in, double mu_out,
                                         double sigma, uint64_t seed);

// Bigram language model over a small vocabulary.
class ToyLm {
 public:
  // Rows are next-token distributions; row `vocab_size` is the start context.
  ToyLm(size_t vocab_size, std::vector<std::vector<double>> table);

  size_t vocab_size() const { return vocab_size_; }
  const std::vector<std::vector<double>>& table() const { return table_; }
  const std::vector<double>& Row(std::optional<int64_t> previous) const;

  // Trace with the complete sorted distribution at every step.
  TokenTrace TraceFor(const std::string& id,
                      const std::vector<int64_t>& target) const;

  // Decoding applied to a full row by direct sorting and renormalization.
  std::vector<double> SchemeDistribution(const std::vector<double>& row,
                                         const SamplingScheme& scheme) const;
  double PathProbability(const std::vector<int64_t>& target,
                         const SamplingScheme& scheme) const;
  std::vector<int64_t> Sample(size_t length, const SamplingScheme& scheme,
                              std::mt19937_64& rng) const;

 private:
  size_t vocab_size_;
  std::vector<std::vector<double>> table_;
};

struct ToyLmCorpus {
  ToyLm lm;
  std::vector<TokenTrace> traces;
};

// Rows ~ Dirichlet(1); targets are ancestral samples of length `length`.
// Requires vocab_size in [2, 16] and length in [1, 8].
absl::StatusOr<ToyLmCorpus> GenToyLmTraces(size_t vocab_size, size_t length,
                                           size_t n_traces, uint64_t seed);

// `per_trace` sampled completions of each trace's target length, under
// `scheme`, labeled with the scheme.
std::vector<CompletionRecord> SampleCompletions(const ToyLmCorpus& corpus,
                                                const SamplingScheme& scheme,
                                                size_t per_trace,
                                                uint64_t seed);

// JSON {"vocab_size": V, "table": [[...], ...]}.
std::string SerializeToyLm(const ToyLm& lm);

}  // namespace privaudit

#endif  // PRIVAUDIT_SYNTHETIC_H_
