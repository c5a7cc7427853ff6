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

#include "privaudit/synthetic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "privaudit/rng.h"

namespace privaudit {
namespace {

// Stream ids keep generators that share a seed independent.
constexpr uint64_t kGaussianPairStream = 0x51;
constexpr uint64_t kRandomizedResponseStream = 0x52;
constexpr uint64_t kGaussianMechanismStream = 0x53;
constexpr uint64_t kLogitPanelStream = 0x54;
constexpr uint64_t kToyLmStream = 0x55;
constexpr uint64_t kCompletionStream = 0x56;

std::string SampleId(size_t i) { return absl::StrCat("s", i); }

// Shuffled labels with exactly `members` ones.
std::vector<uint8_t> ShuffledLabels(size_t total, size_t members,
                                    std::mt19937_64& rng) {
  std::vector<uint8_t> labels(total, 0);
  std::fill(labels.begin(), labels.begin() + members, 1);
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

std::vector<size_t> DescendingOrder(const std::vector<double>& row) {
  std::vector<size_t> order(row.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return row[a] > row[b]; });
  return order;
}

}  // namespace

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ShiftedGaussianAuc(double shift, double sigma) {
  return NormalCdf(shift / (sigma * std::sqrt(2.0)));
}

absl::Status GaussianPairSpec::Validate() const {
  if (m_per_class < 1) {
    return absl::InvalidArgumentError("m_per_class must be >= 1");
  }
  if (!(sigma > 0.0 && std::isfinite(sigma))) {
    return absl::InvalidArgumentError("sigma must be positive");
  }
  if (!std::isfinite(shift)) {
    return absl::InvalidArgumentError("shift must be finite");
  }
  return absl::OkStatus();
}

absl::StatusOr<ScoreRecordSet> GenShiftedGaussianScores(
    const GaussianPairSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  std::mt19937_64 rng = MakeRng(spec.seed, kGaussianPairStream);
  const size_t total = 2 * spec.m_per_class;
  const std::vector<uint8_t> labels =
      ShuffledLabels(total, spec.m_per_class, rng);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  std::vector<ScoreRecord> records;
  records.reserve(total);
  for (size_t i = 0; i < total; ++i) {
    const bool member = labels[i] != 0;
    records.push_back(
        {SampleId(i), (member ? spec.shift : 0.0) + noise(rng), member});
  }
  return ScoreRecordSet::Create(
      std::move(records), {{"generator", "shifted_gaussian"},
                           {"m_per_class", absl::StrCat(spec.m_per_class)},
                           {"shift", FormatDouble(spec.shift)},
                           {"sigma", FormatDouble(spec.sigma)},
                           {"seed", absl::StrCat(spec.seed)},
                           {"analytic_auc", FormatDouble(ShiftedGaussianAuc(
                                                spec.shift, spec.sigma))}});
}

absl::StatusOr<ScoreRecordSet> GenRandomizedResponseGuesses(size_t m,
                                                            double epsilon0,
                                                            uint64_t seed) {
  if (m == 0) return absl::InvalidArgumentError("m must be >= 1");
  if (!(epsilon0 >= 0.0)) {
    return absl::InvalidArgumentError("epsilon0 must be >= 0");
  }
  const double truthful = 1.0 / (1.0 + std::exp(-epsilon0));
  std::mt19937_64 rng = MakeRng(seed, kRandomizedResponseStream);
  std::bernoulli_distribution coin(0.5), honest(truthful);
  std::vector<ScoreRecord> records;
  records.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    const bool member = coin(rng);
    const bool report = honest(rng) ? member : !member;
    records.push_back({SampleId(i), report ? 1.0 : 0.0, member});
  }
  return ScoreRecordSet::Create(std::move(records),
                                {{"generator", "randomized_response"},
                                 {"m", absl::StrCat(m)},
                                 {"epsilon0", FormatDouble(epsilon0)},
                                 {"seed", absl::StrCat(seed)}});
}

double GaussianMechanismDelta(double mu, double epsilon) {
  return NormalCdf(-epsilon / mu + mu / 2.0) -
         std::exp(epsilon) * NormalCdf(-epsilon / mu - mu / 2.0);
}

double GaussianMechanismEpsilon(double mu, double delta) {
  if (mu <= 0.0 || GaussianMechanismDelta(mu, 0.0) <= delta) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (GaussianMechanismDelta(mu, hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (GaussianMechanismDelta(mu, mid) > delta ? lo : hi) = mid;
  }
  return hi;
}

absl::StatusOr<ScoreRecordSet> GenGaussianMechanismScores(size_t m,
                                                          double sigma_noise,
                                                          double delta,
                                                          uint64_t seed) {
  if (m < 2) return absl::InvalidArgumentError("m must be >= 2");
  if (!(sigma_noise > 0.0)) {
    return absl::InvalidArgumentError("sigma_noise must be positive");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  const double mu = 1.0 / sigma_noise;
  std::mt19937_64 rng = MakeRng(seed, kGaussianMechanismStream);
  const std::vector<uint8_t> labels = ShuffledLabels(m, m / 2, rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<ScoreRecord> records;
  records.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    const bool member = labels[i] != 0;
    records.push_back({SampleId(i), (member ? mu : 0.0) + noise(rng), member});
  }
  return ScoreRecordSet::Create(
      std::move(records),
      {{"generator", "gaussian_mechanism"},
       {"m", absl::StrCat(m)},
       {"sigma_noise", FormatDouble(sigma_noise)},
       {"mu", FormatDouble(mu)},
       {"delta", FormatDouble(delta)},
       {"seed", absl::StrCat(seed)},
       {"analytic_epsilon",
        FormatDouble(GaussianMechanismEpsilon(mu, delta))}});
}

absl::StatusOr<LogitPanel> GenLogitPanel(size_t n_samples, size_t n_models,
                                         double mu_in, double mu_out,
                                         double sigma, uint64_t seed) {
  if (n_samples < 1)
    return absl::InvalidArgumentError("n_samples must be >= 1");
  if (n_models < 2) return absl::InvalidArgumentError("n_models must be >= 2");
  if (!(sigma > 0.0 && std::isfinite(sigma))) {
    return absl::InvalidArgumentError("sigma must be positive");
  }
  std::mt19937_64 rng = MakeRng(seed, kLogitPanelStream);
  std::bernoulli_distribution half(0.5);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<uint8_t> mask(n_samples * n_models);
  std::vector<double> logits(n_samples * n_models);
  std::vector<uint8_t> membership(n_samples);
  for (size_t i = 0; i < n_samples; ++i) {
    uint8_t* row = &mask[i * n_models];
    row[0] = half(rng) ? 1 : 0;
    membership[i] = row[0];
    for (;;) {
      size_t in = 0;
      for (size_t j = 1; j < n_models; ++j) {
        row[j] = half(rng) ? 1 : 0;
        in += row[j];
      }
      if (n_models < 3 || (in > 0 && in < n_models - 1)) break;
    }
    for (size_t j = 0; j < n_models; ++j) {
      logits[i * n_models + j] = (row[j] ? mu_in : mu_out) + noise(rng);
    }
  }
  return LogitPanel::Create(n_samples, n_models, 0, std::move(logits),
                            std::move(mask), std::move(membership),
                            {{"generator", "logit_panel"},
                             {"mu_in", FormatDouble(mu_in)},
                             {"mu_out", FormatDouble(mu_out)},
                             {"sigma", FormatDouble(sigma)},
                             {"seed", absl::StrCat(seed)},
                             {"analytic_auc", FormatDouble(ShiftedGaussianAuc(
                                                  mu_in - mu_out, sigma))}});
}

ToyLm::ToyLm(size_t vocab_size, std::vector<std::vector<double>> table)
    : vocab_size_(vocab_size), table_(std::move(table)) {}

const std::vector<double>& ToyLm::Row(std::optional<int64_t> previous) const {
  return table_[previous ? static_cast<size_t>(*previous) : vocab_size_];
}

TokenTrace ToyLm::TraceFor(const std::string& id,
                           const std::vector<int64_t>& target) const {
  TokenTrace trace;
  trace.id = id;
  trace.coverage_floor = 1.0;
  trace.vocab_size = vocab_size_;
  std::optional<int64_t> previous;
  for (int64_t token : target) {
    const std::vector<double>& row = Row(previous);
    TraceStep step;
    step.target_token = token;
    step.target_prob = row[static_cast<size_t>(token)];
    step.target_rank = 1;
    for (double p : row) {
      if (p > step.target_prob) ++step.target_rank;
    }
    step.sorted_probs = row;
    std::sort(step.sorted_probs.begin(), step.sorted_probs.end(),
              std::greater<>());
    trace.steps.push_back(std::move(step));
    previous = token;
  }
  return trace;
}

std::vector<double> ToyLm::SchemeDistribution(
    const std::vector<double>& row, const SamplingScheme& scheme) const {
  std::vector<double> out(row.size(), 0.0);
  const std::vector<size_t> order = DescendingOrder(row);
  switch (scheme.kind) {
    case SamplingScheme::Kind::kGreedy:
      out[order[0]] = 1.0;
      break;
    case SamplingScheme::Kind::kTemperature: {
      double z = 0.0;
      for (size_t v = 0; v < row.size(); ++v) {
        out[v] = std::pow(row[v], 1.0 / scheme.temperature);
        z += out[v];
      }
      for (double& q : out) q /= z;
      break;
    }
    case SamplingScheme::Kind::kTopK: {
      const size_t keep = std::min(scheme.k, row.size());
      double z = 0.0;
      for (size_t r = 0; r < keep; ++r) z += row[order[r]];
      for (size_t r = 0; r < keep; ++r) out[order[r]] = row[order[r]] / z;
      break;
    }
    case SamplingScheme::Kind::kTopP: {
      size_t keep = row.size();
      double z = 0.0;
      for (size_t r = 0; r < row.size(); ++r) {
        z += row[order[r]];
        if (scheme.p < 1.0 && z > scheme.p) {
          keep = r + 1;
          break;
        }
      }
      for (size_t r = 0; r < keep; ++r) out[order[r]] = row[order[r]] / z;
      break;
    }
  }
  return out;
}

double ToyLm::PathProbability(const std::vector<int64_t>& target,
                              const SamplingScheme& scheme) const {
  double p = 1.0;
  std::optional<int64_t> previous;
  for (int64_t token : target) {
    p *= SchemeDistribution(Row(previous), scheme)[static_cast<size_t>(token)];
    previous = token;
  }
  return p;
}

std::vector<int64_t> ToyLm::Sample(size_t length, const SamplingScheme& scheme,
                                   std::mt19937_64& rng) const {
  std::vector<int64_t> out;
  std::optional<int64_t> previous;
  for (size_t i = 0; i < length; ++i) {
    const std::vector<double> dist = SchemeDistribution(Row(previous), scheme);
    std::discrete_distribution<int64_t> pick(dist.begin(), dist.end());
    out.push_back(pick(rng));
    previous = out.back();
  }
  return out;
}

absl::StatusOr<ToyLmCorpus> GenToyLmTraces(size_t vocab_size, size_t length,
                                           size_t n_traces, uint64_t seed) {
  if (vocab_size < 2 || vocab_size > 16) {
    return absl::InvalidArgumentError("vocab_size must lie in [2, 16]");
  }
  if (length < 1 || length > 8) {
    return absl::InvalidArgumentError("length must lie in [1, 8]");
  }
  if (n_traces < 1) return absl::InvalidArgumentError("n_traces must be >= 1");
  std::mt19937_64 rng = MakeRng(seed, kToyLmStream);
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<std::vector<double>> table(vocab_size + 1,
                                         std::vector<double>(vocab_size));
  for (auto& row : table) {
    double z = 0.0;
    for (double& p : row) {
      p = gamma1(rng);
      z += p;
    }
    for (double& p : row) p /= z;
  }
  ToyLmCorpus corpus{ToyLm(vocab_size, std::move(table)), {}};
  const SamplingScheme ancestral = SamplingScheme::Temperature(1.0);
  for (size_t i = 0; i < n_traces; ++i) {
    corpus.traces.push_back(corpus.lm.TraceFor(
        absl::StrCat("t", i), corpus.lm.Sample(length, ancestral, rng)));
  }
  return corpus;
}

std::vector<CompletionRecord> SampleCompletions(const ToyLmCorpus& corpus,
                                                const SamplingScheme& scheme,
                                                size_t per_trace,
                                                uint64_t seed) {
  std::mt19937_64 rng = MakeRng(seed, kCompletionStream);
  std::vector<CompletionRecord> out;
  out.reserve(corpus.traces.size() * per_trace);
  for (const TokenTrace& trace : corpus.traces) {
    const std::vector<int64_t> target = trace.TargetTokens();
    for (size_t j = 0; j < per_trace; ++j) {
      out.push_back({absl::StrCat(trace.id, "/", j), scheme.Label(),
                     corpus.lm.Sample(target.size(), scheme, rng), target});
    }
  }
  return out;
}

std::string SerializeToyLm(const ToyLm& lm) {
  nlohmann::json j;
  j["vocab_size"] = lm.vocab_size();
  j["table"] = lm.table();
  return j.dump() + "\n";
}

}  // namespace privaudit
