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

#include "privaudit/extraction.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace privaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Past 2^53 consecutive integers are no longer representable, so the
// +/-1 correction in NForTarget stops being meaningful.
constexpr double kExactIntegerLimit = 9007199254740992.0;

absl::StatusOr<double> ParseReal(const std::string& text,
                                 const std::string& what) {
  double v = 0.0;
  if (!absl::SimpleAtod(text, &v) || !std::isfinite(v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot parse ", what, " from '", text, "'"));
  }
  return v;
}

// Shape of the recorded list relative to the target.
struct StepView {
  const std::vector<double>& probs;
  double t;
  size_t rank;
  bool beyond;  // target is past the recorded list
  double cap;   // every unrecorded token has probability <= cap
  double rest;  // unrecorded mass, excluding the target
  std::optional<size_t> unrecorded;  // number of unrecorded non-target tokens
};

StepView View(const TraceStep& step, std::optional<size_t> vocab_size) {
  const auto& probs = step.sorted_probs;
  const bool beyond = step.target_rank > probs.size();
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (beyond) sum += step.target_prob;
  std::optional<size_t> unrecorded;
  if (vocab_size) {
    const size_t known = probs.size() + (beyond ? 1 : 0);
    unrecorded = *vocab_size > known ? *vocab_size - known : 0;
  }
  return {probs,
          step.target_prob,
          step.target_rank,
          beyond,
          probs.empty() ? 1.0 : probs.back(),
          std::max(0.0, 1.0 - sum),
          unrecorded};
}

StepProb TemperatureProb(const StepView& v, double temperature) {
  if (v.t <= 0.0) return {0.0, 0.0};
  const double a = 1.0 / temperature;
  // Scale by the largest probability so tilted values stay representable.
  const double top = std::max(v.probs.front(), v.t);
  const double log_top = std::log(top);
  auto tilt = [&](double p) {
    return p <= 0.0 ? 0.0 : std::exp(a * (std::log(p) - log_top));
  };
  double z = 0.0;
  for (double p : v.probs) z += tilt(p);
  if (v.beyond) z += tilt(v.t);
  const double num = tilt(v.t);

  double tail = 0.0;
  if (v.rest > 0.0 && v.cap > 0.0) {
    if (a >= 1.0) {
      // sum p^a <= cap^(a-1) * sum p for p <= cap.
      tail = tilt(v.cap) / (v.cap / top) * (v.rest / top);
    } else if (v.unrecorded) {
      // Power mean: mass spread evenly over the unrecorded tokens.
      const auto k = static_cast<double>(*v.unrecorded);
      tail = std::min(std::pow(k, 1.0 - a) * tilt(v.rest), k * tilt(v.cap));
    } else {
      tail = kInf;
    }
  }
  return {num / z, std::isinf(tail) ? 0.0 : num / (z + tail)};
}

StepProb TopKProb(const StepView& v, size_t k) {
  if (v.rank > k || v.t <= 0.0) return {0.0, 0.0};
  double known = 0.0;
  for (size_t j = 0; j < std::min(k, v.probs.size()); ++j) known += v.probs[j];
  size_t filled = std::min(k, v.probs.size());
  if (v.beyond) {
    known += v.t;
    ++filled;
  }
  double missing = 0.0;
  if (k > filled && v.rest > 0.0) {
    size_t slots = k - filled;
    if (v.unrecorded) slots = std::min(slots, *v.unrecorded);
    missing = std::min(v.rest, static_cast<double>(slots) * v.cap);
  }
  return {v.t / known, v.t / (known + missing)};
}

absl::StatusOr<StepProb> TopPProb(const StepView& v, double p) {
  double cumulative = 0.0;
  for (size_t j = 0; j < v.probs.size(); ++j) {
    cumulative += v.probs[j];
    if (cumulative > p) {
      if (v.rank > j + 1 || v.t <= 0.0) return StepProb{0.0, 0.0};
      return StepProb{v.t / cumulative, v.t / cumulative};
    }
  }
  return absl::FailedPreconditionError(
      absl::StrCat("unresolvable nucleus: recorded probabilities sum to ",
                   FormatDouble(cumulative), ", which does not exceed top_p ",
                   FormatDouble(p)));
}

absl::Status StepError(const TokenTrace& trace, size_t step,
                       const absl::Status& status) {
  return absl::Status(status.code(),
                      absl::StrCat("trace '", trace.id, "' step ", step, ": ",
                                   status.message()));
}

}  // namespace

absl::StatusOr<SamplingScheme> SamplingScheme::Parse(const std::string& text) {
  std::vector<std::string> parts =
      absl::StrSplit(text, absl::MaxSplits(':', 1));
  SamplingScheme scheme;
  const std::string& kind = parts[0];
  if (kind == "greedy" && parts.size() == 1) {
    return scheme;
  }
  if (parts.size() != 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad sampling scheme '", text,
                     "'; expected greedy, temperature:T, top_k:K or top_p:P"));
  }
  if (kind == "temperature") {
    auto t = ParseReal(parts[1], "temperature");
    if (!t.ok()) return t.status();
    scheme = Temperature(*t);
  } else if (kind == "top_k") {
    uint64_t k = 0;
    if (!absl::SimpleAtoi(parts[1], &k)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot parse top_k from '", parts[1], "'"));
    }
    scheme = TopK(static_cast<size_t>(k));
  } else if (kind == "top_p") {
    auto p = ParseReal(parts[1], "top_p");
    if (!p.ok()) return p.status();
    scheme = TopP(*p);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown sampling scheme '", kind, "'"));
  }
  if (absl::Status s = scheme.Validate(); !s.ok()) return s;
  return scheme;
}

std::string SamplingScheme::Label() const {
  switch (kind) {
    case Kind::kGreedy:
      return "greedy";
    case Kind::kTemperature:
      return "temperature:" + FormatDouble(temperature);
    case Kind::kTopK:
      return absl::StrCat("top_k:", k);
    case Kind::kTopP:
      return "top_p:" + FormatDouble(p);
  }
  return "";
}

absl::Status SamplingScheme::Validate() const {
  switch (kind) {
    case Kind::kGreedy:
      return absl::OkStatus();
    case Kind::kTemperature:
      if (!(temperature > 0.0 && std::isfinite(temperature))) {
        return absl::InvalidArgumentError("temperature must be positive");
      }
      return absl::OkStatus();
    case Kind::kTopK:
      if (k == 0) return absl::InvalidArgumentError("top_k needs k >= 1");
      return absl::OkStatus();
    case Kind::kTopP:
      if (!(p > 0.0 && p <= 1.0)) {
        return absl::InvalidArgumentError("top_p needs p in (0, 1]");
      }
      return absl::OkStatus();
  }
  return absl::InvalidArgumentError("unknown sampling scheme kind");
}

absl::StatusOr<MatchPredicate> MatchPredicate::Parse(const std::string& text) {
  if (text == "exact") return MatchPredicate{Kind::kExact, 1.0};
  if (text == "inclusion") return MatchPredicate{Kind::kInclusion, 1.0};
  std::vector<std::string> parts =
      absl::StrSplit(text, absl::MaxSplits(':', 1));
  if (parts[0] == "lcs" && parts.size() == 2) {
    auto tau = ParseReal(parts[1], "lcs tau");
    if (!tau.ok()) return tau.status();
    MatchPredicate predicate{Kind::kLcs, *tau};
    if (absl::Status s = predicate.Validate(); !s.ok()) return s;
    return predicate;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("bad match predicate '", text,
                   "'; expected exact, inclusion or lcs:TAU"));
}

std::string MatchPredicate::Label() const {
  switch (kind) {
    case Kind::kExact:
      return "exact";
    case Kind::kInclusion:
      return "inclusion";
    case Kind::kLcs:
      return "lcs:" + FormatDouble(tau);
  }
  return "";
}

absl::Status MatchPredicate::Validate() const {
  if (kind == Kind::kLcs && !(tau > 0.0 && tau <= 1.0)) {
    return absl::InvalidArgumentError("lcs tau must lie in (0, 1]");
  }
  return absl::OkStatus();
}

absl::StatusOr<StepProb> EffectiveStepProb(const TraceStep& step,
                                           const SamplingScheme& scheme,
                                           std::optional<size_t> vocab_size) {
  if (absl::Status s = scheme.Validate(); !s.ok()) return s;
  if (step.sorted_probs.empty()) {
    return absl::InvalidArgumentError("step has no recorded probabilities");
  }
  const StepView v = View(step, vocab_size);
  switch (scheme.kind) {
    case SamplingScheme::Kind::kGreedy: {
      const bool unique_top = v.probs.size() < 2 || v.probs[1] < v.probs[0];
      const double q = (v.rank == 1 && unique_top) ? 1.0 : 0.0;
      return StepProb{q, q};
    }
    case SamplingScheme::Kind::kTemperature:
      return TemperatureProb(v, scheme.temperature);
    case SamplingScheme::Kind::kTopK:
      return TopKProb(v, scheme.k);
    case SamplingScheme::Kind::kTopP:
      // p = 1 keeps the whole distribution.
      if (scheme.p >= 1.0) return TemperatureProb(v, 1.0);
      return TopPProb(v, scheme.p);
  }
  return absl::InvalidArgumentError("unknown sampling scheme kind");
}

absl::StatusOr<PzResult> ComputePz(const TokenTrace& trace,
                                   const SamplingScheme& scheme) {
  if (absl::Status s = trace.Validate(); !s.ok()) return s;
  double log_pz = 0.0, log_lower = 0.0;
  for (size_t s = 0; s < trace.steps.size(); ++s) {
    auto q = EffectiveStepProb(trace.steps[s], scheme, trace.vocab_size);
    if (!q.ok()) return StepError(trace, s, q.status());
    log_pz += std::log(q->value);
    log_lower += std::log(q->lower);
  }
  PzResult result;
  result.log_pz = log_pz;
  result.pz = log_pz == -kInf ? 0.0 : std::exp(log_pz);
  result.pz_lower = log_lower == -kInf ? 0.0 : std::exp(log_lower);
  return result;
}

double NpProbability(double pz, uint64_t n) {
  if (n == 1) return pz;
  if (pz <= 0.0) return 0.0;
  if (pz >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-pz));
}

double NForTarget(double pz, double p) {
  if (pz <= 0.0) return kInf;
  if (pz >= p) return 1.0;
  double n = std::ceil(std::log1p(-p) / std::log1p(-pz));
  if (!(n < kExactIntegerLimit)) return n;
  n = std::max(n, 1.0);
  auto prob = [&](double count) {
    return NpProbability(pz, static_cast<uint64_t>(count));
  };
  // The ratio is exact in real arithmetic; rounding can put it one off.
  while (prob(n) < p) n += 1.0;
  while (n > 1.0 && prob(n - 1.0) >= p) n -= 1.0;
  return n;
}

size_t Lcs(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

absl::StatusOr<bool> Match(const CompletionRecord& record,
                           const MatchPredicate& predicate) {
  if (record.generated.empty() || record.target.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "completion '", record.id, "' has an empty token sequence"));
  }
  const auto& y = record.generated;
  const auto& z = record.target;
  switch (predicate.kind) {
    case MatchPredicate::Kind::kExact:
      return y == z;
    case MatchPredicate::Kind::kInclusion:
      return std::search(y.begin(), y.end(), z.begin(), z.end()) != y.end();
    case MatchPredicate::Kind::kLcs:
      return static_cast<double>(Lcs(y, z)) / static_cast<double>(z.size()) >=
             predicate.tau;
  }
  return false;
}

absl::StatusOr<std::vector<PzResult>> ComputePzBatch(
    const std::vector<TokenTrace>& traces, const SamplingScheme& scheme) {
  std::vector<PzResult> results(traces.size());
  std::vector<absl::Status> errors(traces.size());
  const auto n = static_cast<std::ptrdiff_t>(traces.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto r = ComputePz(traces[i], scheme);
    if (r.ok()) {
      results[i] = *r;
    } else {
      errors[i] = r.status();
    }
  }
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  return results;
}

absl::StatusOr<RateTable> ExtractionRates(
    const std::vector<TokenTrace>& traces,
    const std::vector<CompletionRecord>& completions,
    const std::vector<SamplingScheme>& schemes,
    const std::vector<MatchPredicate>& predicates,
    const std::vector<double>& pz_thresholds) {
  if (traces.empty() && completions.empty()) {
    return absl::InvalidArgumentError("extraction corpus is empty");
  }
  if (schemes.empty()) {
    return absl::InvalidArgumentError("no sampling schemes requested");
  }
  RateTable table;
  table.pz_thresholds = pz_thresholds;
  for (const auto& predicate : predicates) {
    if (absl::Status s = predicate.Validate(); !s.ok()) return s;
    table.predicates.push_back(predicate.Label());
  }

  std::vector<std::string> completion_labels;
  for (const auto& record : completions) {
    auto scheme = SamplingScheme::Parse(record.scheme);
    if (!scheme.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "completion '", record.id, "': ", scheme.status().message()));
    }
    completion_labels.push_back(scheme->Label());
  }

  for (const SamplingScheme& scheme : schemes) {
    if (absl::Status s = scheme.Validate(); !s.ok()) return s;
    RateRow row;
    row.scheme = scheme.Label();

    std::vector<size_t> hits(predicates.size(), 0);
    for (size_t i = 0; i < completions.size(); ++i) {
      if (completion_labels[i] != row.scheme) continue;
      ++row.completions;
      for (size_t j = 0; j < predicates.size(); ++j) {
        auto matched = Match(completions[i], predicates[j]);
        if (!matched.ok()) return matched.status();
        if (*matched) ++hits[j];
      }
    }
    if (row.completions > 0) {
      for (size_t j = 0; j < predicates.size(); ++j) {
        row.match_rates[table.predicates[j]] =
            static_cast<double>(hits[j]) / static_cast<double>(row.completions);
      }
    }

    if (!traces.empty()) {
      auto pz = ComputePzBatch(traces, scheme);
      if (!pz.ok()) return pz.status();
      row.traces = traces.size();
      double sum = 0.0;
      for (const PzResult& r : *pz) {
        sum += r.pz;
        row.max_truncation_error =
            std::max(row.max_truncation_error, r.pz - r.pz_lower);
      }
      row.mean_pz = sum / static_cast<double>(traces.size());
      for (double threshold : pz_thresholds) {
        size_t above = 0;
        for (const PzResult& r : *pz) {
          if (r.pz > threshold) ++above;
        }
        row.pz_rates[threshold] =
            static_cast<double>(above) / static_cast<double>(traces.size());
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

absl::StatusOr<std::vector<NpPoint>> NpCurve(
    const std::vector<double>& pz_values, const std::vector<uint64_t>& n_grid,
    const std::vector<double>& p_targets) {
  if (pz_values.empty() || n_grid.empty() || p_targets.empty()) {
    return absl::InvalidArgumentError("np curve inputs must be nonempty");
  }
  for (double pz : pz_values) {
    if (!(pz >= 0.0 && pz <= 1.0)) {
      return absl::InvalidArgumentError("p_z values must lie in [0, 1]");
    }
  }
  for (uint64_t n : n_grid) {
    if (n == 0) return absl::InvalidArgumentError("n must be >= 1");
  }
  std::vector<NpPoint> curve;
  curve.reserve(n_grid.size() * p_targets.size());
  for (uint64_t n : n_grid) {
    for (double p : p_targets) {
      size_t count = 0;
      for (double pz : pz_values) {
        if (NpProbability(pz, n) >= p) ++count;
      }
      curve.push_back(
          {n, p,
           static_cast<double>(count) / static_cast<double>(pz_values.size())});
    }
  }
  return curve;
}

std::string NpCurveCsv(const std::vector<NpPoint>& curve) {
  std::string out = "n,p,fraction\n";
  for (const NpPoint& point : curve) {
    absl::StrAppend(&out, point.n, ",", FormatDouble(point.p), ",",
                    FormatDouble(point.fraction), "\n");
  }
  return out;
}

namespace serial {

absl::StatusOr<std::vector<PzResult>> ComputePzBatch(
    const std::vector<TokenTrace>& traces, const SamplingScheme& scheme) {
  std::vector<PzResult> results;
  results.reserve(traces.size());
  for (const TokenTrace& trace : traces) {
    if (absl::Status s = trace.Validate(); !s.ok()) return s;
    PzResult r{1.0, 0.0, 1.0};
    for (size_t s = 0; s < trace.steps.size(); ++s) {
      auto q = EffectiveStepProb(trace.steps[s], scheme, trace.vocab_size);
      if (!q.ok()) return StepError(trace, s, q.status());
      r.pz *= q->value;
      r.pz_lower *= q->lower;
    }
    r.log_pz = std::log(r.pz);
    results.push_back(r);
  }
  return results;
}

}  // namespace serial
}  // namespace privaudit
