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

// Shared data model for attack observations and the file formats that carry
// them. Every type here is immutable once constructed and validated, so
// values can be shared freely between concurrent analyses.

#ifndef PRIVAUDIT_OBSERVATION_H_
#define PRIVAUDIT_OBSERVATION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace privaudit {

using Metadata = std::map<std::string, std::string>;

// One canary: the attacker's score (higher = more member-like) and the true
// membership bit.
struct ScoreRecord {
  std::string sample_id;
  double score = 0.0;
  bool member = false;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

class ScoreRecordSet {
 public:
  // Validates finiteness of every score and uniqueness of sample ids.
  static absl::StatusOr<ScoreRecordSet> Create(std::vector<ScoreRecord> records,
                                               Metadata metadata = {});

  const std::vector<ScoreRecord>& records() const { return records_; }
  const Metadata& metadata() const { return metadata_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  size_t num_members() const { return num_members_; }
  size_t num_nonmembers() const { return records_.size() - num_members_; }

  // Analyses over ROC/epsilon need at least one record of each class.
  absl::Status RequireBothClasses() const;

  std::vector<double> Scores() const;
  std::vector<uint8_t> Labels() const;

  friend bool operator==(const ScoreRecordSet&,
                         const ScoreRecordSet&) = default;

 private:
  ScoreRecordSet(std::vector<ScoreRecord> records, Metadata metadata,
                 size_t num_members)
      : records_(std::move(records)),
        metadata_(std::move(metadata)),
        num_members_(num_members) {}

  std::vector<ScoreRecord> records_;
  Metadata metadata_;
  size_t num_members_ = 0;
};

// Samples x models matrix of confidence logits. Column `target_index` is the
// audited model; every other column is a shadow model.
class LogitPanel {
 public:
  static absl::StatusOr<LogitPanel> Create(size_t n_samples, size_t n_models,
                                           size_t target_index,
                                           std::vector<double> logits,
                                           std::vector<uint8_t> membership_mask,
                                           std::vector<uint8_t> true_membership,
                                           Metadata metadata = {});

  size_t n_samples() const { return n_samples_; }
  size_t n_models() const { return n_models_; }
  size_t target_index() const { return target_index_; }

  double logit(size_t sample, size_t model) const {
    return logits_[sample * n_models_ + model];
  }
  bool in_model(size_t sample, size_t model) const {
    return mask_[sample * n_models_ + model] != 0;
  }
  bool member(size_t sample) const { return true_membership_[sample] != 0; }

  const std::vector<double>& logits() const { return logits_; }
  const std::vector<uint8_t>& membership_mask() const { return mask_; }
  const std::vector<uint8_t>& true_membership() const {
    return true_membership_;
  }
  const Metadata& metadata() const { return metadata_; }

  friend bool operator==(const LogitPanel&, const LogitPanel&) = default;

 private:
  LogitPanel() = default;

  size_t n_samples_ = 0;
  size_t n_models_ = 0;
  size_t target_index_ = 0;
  std::vector<double> logits_;
  std::vector<uint8_t> mask_;
  std::vector<uint8_t> true_membership_;
  Metadata metadata_;
};

enum class GuessStrategy { kOneSided, kTwoSided };

// Outcome of a guessing game over m canaries: c_hat guesses issued, c of them
// correct. Abstentions are m - c_hat.
struct GuessSummary {
  size_t m = 0;
  size_t c_hat = 0;
  size_t c = 0;
  GuessStrategy strategy = GuessStrategy::kOneSided;

  absl::Status Validate() const;
};

inline constexpr double kDefaultCoverageFloor = 0.9999;

struct TraceStep {
  int64_t target_token = 0;
  double target_prob = 0.0;
  // 1-based rank of the target in the full next-token distribution.
  size_t target_rank = 1;
  // Descending raw probabilities, truncated once coverage_floor is reached.
  std::vector<double> sorted_probs;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct TokenTrace {
  std::string id;
  std::vector<TraceStep> steps;
  double coverage_floor = kDefaultCoverageFloor;
  // Vocabulary size, when known. Needed to bound the neglected tail under
  // temperatures above 1.
  std::optional<size_t> vocab_size;

  std::vector<int64_t> TargetTokens() const;
  absl::Status Validate() const;

  friend bool operator==(const TokenTrace&, const TokenTrace&) = default;
};

struct CompletionRecord {
  std::string id;
  // Label of the sampling scheme that produced `generated`, e.g. "top_k:40".
  std::string scheme;
  std::vector<int64_t> generated;
  std::vector<int64_t> target;

  friend bool operator==(const CompletionRecord&,
                         const CompletionRecord&) = default;
};

enum class ScoreFormat { kJsonl, kCsv };

// Picks the format from the file extension (".csv" => CSV, otherwise JSONL).
ScoreFormat ScoreFormatFromPath(const std::string& path);

absl::StatusOr<ScoreRecordSet> LoadScoreRecords(const std::string& path,
                                                ScoreFormat format);
absl::StatusOr<ScoreRecordSet> ParseScoreRecords(const std::string& contents,
                                                 ScoreFormat format);
std::string SerializeScoreRecords(const ScoreRecordSet& set,
                                  ScoreFormat format);

absl::StatusOr<LogitPanel> LoadLogitPanel(const std::string& path);
absl::StatusOr<LogitPanel> ParseLogitPanel(const std::string& contents);
std::string SerializeLogitPanel(const LogitPanel& panel);

absl::StatusOr<std::vector<TokenTrace>> LoadTokenTraces(
    const std::string& path);
absl::StatusOr<std::vector<TokenTrace>> ParseTokenTraces(
    const std::string& contents);
std::string SerializeTokenTraces(const std::vector<TokenTrace>& traces);

absl::StatusOr<std::vector<CompletionRecord>> LoadCompletions(
    const std::string& path);
absl::StatusOr<std::vector<CompletionRecord>> ParseCompletions(
    const std::string& contents);
std::string SerializeCompletions(const std::vector<CompletionRecord>& records);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, const std::string& contents);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace privaudit

#endif  // PRIVAUDIT_OBSERVATION_H_
