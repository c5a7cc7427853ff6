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

#include "privaudit/observation.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace privaudit {
namespace {

using nlohmann::json;

// Splits on '\n', keeping 1-based line numbers; tolerates CRLF.
std::vector<std::pair<size_t, absl::string_view>> NumberedLines(
    absl::string_view contents) {
  std::vector<std::pair<size_t, absl::string_view>> lines;
  size_t line_no = 0;
  for (absl::string_view line : absl::StrSplit(contents, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line_no, line);
  }
  return lines;
}

absl::Status LineError(size_t line, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", what));
}

absl::StatusOr<double> StrictDouble(absl::string_view text) {
  text = absl::StripAsciiWhitespace(text);
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot parse number '", text, "'"));
  }
  return value;
}

absl::StatusOr<double> JsonDouble(const json& value, absl::string_view field) {
  if (!value.is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", field, "' must be a number"));
  }
  double x = value.get<double>();
  if (!std::isfinite(x)) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", field, "' is not finite"));
  }
  return x;
}

absl::StatusOr<bool> JsonBit(const json& value, absl::string_view field) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_number_integer() || value.is_number_unsigned()) {
    int64_t bit = value.get<int64_t>();
    if (bit == 0 || bit == 1) return bit == 1;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("field '", field, "' must be 0 or 1"));
}

absl::StatusOr<size_t> JsonCount(const json& value, absl::string_view field) {
  if (value.is_number_unsigned()) return value.get<size_t>();
  if (value.is_number_integer() && value.get<int64_t>() >= 0) {
    return static_cast<size_t>(value.get<int64_t>());
  }
  return absl::InvalidArgumentError(
      absl::StrCat("field '", field, "' must be a non-negative integer"));
}

absl::StatusOr<const json*> Field(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing field '", key, "'"));
  }
  return &*it;
}

absl::StatusOr<std::vector<int64_t>> JsonTokens(const json& value,
                                                absl::string_view field) {
  if (!value.is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", field, "' must be an array of token ids"));
  }
  std::vector<int64_t> tokens;
  tokens.reserve(value.size());
  for (const json& t : value) {
    if (!t.is_number_integer()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", field, "' holds a non-integer token id"));
    }
    tokens.push_back(t.get<int64_t>());
  }
  return tokens;
}

absl::StatusOr<json> ParseJson(absl::string_view text) {
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    return absl::InvalidArgumentError("malformed JSON");
  }
  return parsed;
}

absl::Status Annotate(const absl::Status& status, size_t line) {
  return LineError(line, status.message());
}

json DoubleToJson(double x) { return json(x); }

}  // namespace

absl::StatusOr<ScoreRecordSet> ScoreRecordSet::Create(
    std::vector<ScoreRecord> records, Metadata metadata) {
  std::set<absl::string_view> seen;
  size_t members = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    const ScoreRecord& r = records[i];
    if (!std::isfinite(r.score)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "record ", i, " (", r.sample_id, "): field 'score' is not finite"));
    }
    if (!seen.insert(r.sample_id).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "record ", i, ": duplicate sample_id '", r.sample_id, "'"));
    }
    members += r.member ? 1 : 0;
  }
  return ScoreRecordSet(std::move(records), std::move(metadata), members);
}

absl::Status ScoreRecordSet::RequireBothClasses() const {
  if (num_members() == 0 || num_nonmembers() == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need at least one member and one non-member (have ", num_members(),
        " members, ", num_nonmembers(), " non-members)"));
  }
  return absl::OkStatus();
}

std::vector<double> ScoreRecordSet::Scores() const {
  std::vector<double> scores;
  scores.reserve(records_.size());
  for (const auto& r : records_) scores.push_back(r.score);
  return scores;
}

std::vector<uint8_t> ScoreRecordSet::Labels() const {
  std::vector<uint8_t> labels;
  labels.reserve(records_.size());
  for (const auto& r : records_) labels.push_back(r.member ? 1 : 0);
  return labels;
}

absl::StatusOr<LogitPanel> LogitPanel::Create(
    size_t n_samples, size_t n_models, size_t target_index,
    std::vector<double> logits, std::vector<uint8_t> membership_mask,
    std::vector<uint8_t> true_membership, Metadata metadata) {
  if (n_samples == 0 || n_models == 0) {
    return absl::InvalidArgumentError("panel must have samples and models");
  }
  if (target_index >= n_models) {
    return absl::InvalidArgumentError(
        absl::StrCat("target_index ", target_index, " out of range for ",
                     n_models, " models"));
  }
  const size_t cells = n_samples * n_models;
  if (logits.size() != cells || membership_mask.size() != cells) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: expected ", n_samples, "x", n_models,
                     " logits and mask"));
  }
  if (true_membership.size() != n_samples) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: true_membership has ",
                     true_membership.size(), " entries, expected ", n_samples));
  }
  for (size_t i = 0; i < n_samples; ++i) {
    for (size_t j = 0; j < n_models; ++j) {
      const size_t k = i * n_models + j;
      if (!std::isfinite(logits[k])) {
        return absl::InvalidArgumentError(
            absl::StrCat("sample ", i, " model ", j, ": logit is not finite"));
      }
      if (membership_mask[k] > 1) {
        return absl::InvalidArgumentError(absl::StrCat(
            "sample ", i, " model ", j, ": membership_mask must be 0/1"));
      }
    }
    if (true_membership[i] > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", i, ": true_membership must be 0/1"));
    }
    if (true_membership[i] != membership_mask[i * n_models + target_index]) {
      return absl::InvalidArgumentError(absl::StrCat(
          "sample ", i,
          ": true_membership disagrees with membership_mask at target_index"));
    }
  }
  LogitPanel panel;
  panel.n_samples_ = n_samples;
  panel.n_models_ = n_models;
  panel.target_index_ = target_index;
  panel.logits_ = std::move(logits);
  panel.mask_ = std::move(membership_mask);
  panel.true_membership_ = std::move(true_membership);
  panel.metadata_ = std::move(metadata);
  return panel;
}

absl::Status GuessSummary::Validate() const {
  if (c > c_hat || c_hat > m) {
    return absl::InvalidArgumentError(
        absl::StrCat("guess summary must satisfy 0 <= c <= c_hat <= m (c=", c,
                     ", c_hat=", c_hat, ", m=", m, ")"));
  }
  return absl::OkStatus();
}

std::vector<int64_t> TokenTrace::TargetTokens() const {
  std::vector<int64_t> tokens;
  tokens.reserve(steps.size());
  for (const auto& s : steps) tokens.push_back(s.target_token);
  return tokens;
}

absl::Status TokenTrace::Validate() const {
  if (steps.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("trace '", id, "' has no steps"));
  }
  if (!(coverage_floor > 0.0 && coverage_floor <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("trace '", id, "': coverage_floor must be in (0, 1]"));
  }
  for (size_t s = 0; s < steps.size(); ++s) {
    const TraceStep& step = steps[s];
    auto fail = [&](absl::string_view what) {
      return absl::InvalidArgumentError(
          absl::StrCat("trace '", id, "' step ", s, ": ", what));
    };
    if (!(step.target_prob >= 0.0 && step.target_prob <= 1.0)) {
      return fail("target_prob outside [0, 1]");
    }
    if (step.target_rank == 0) return fail("target_rank is 1-based");
    double sum = 0.0;
    for (size_t j = 0; j < step.sorted_probs.size(); ++j) {
      const double p = step.sorted_probs[j];
      if (!(p >= 0.0 && p <= 1.0)) return fail("sorted_probs outside [0, 1]");
      if (j > 0 && p > step.sorted_probs[j - 1]) {
        return fail("sorted_probs must be non-increasing");
      }
      sum += p;
    }
    if (sum > 1.0 + 1e-9) return fail("sorted_probs sum exceeds 1");
    if (sum < coverage_floor - 1e-9) {
      return fail("sorted_probs cover less mass than coverage_floor");
    }
    if (step.target_rank <= step.sorted_probs.size()) {
      if (std::abs(step.sorted_probs[step.target_rank - 1] - step.target_prob) >
          1e-9) {
        return fail("sorted_probs[target_rank] disagrees with target_prob");
      }
    } else if (!step.sorted_probs.empty() &&
               step.target_prob > step.sorted_probs.back() + 1e-9) {
      return fail("target beyond the truncated list outweighs its last entry");
    }
    if (vocab_size && step.target_rank > *vocab_size) {
      return fail("target_rank exceeds vocab_size");
    }
  }
  return absl::OkStatus();
}

ScoreFormat ScoreFormatFromPath(const std::string& path) {
  std::string lower = absl::AsciiStrToLower(path);
  if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".csv") == 0) {
    return ScoreFormat::kCsv;
  }
  return ScoreFormat::kJsonl;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write '", path, "'"));
  }
  out << contents;
  out.close();
  if (!out) {
    return absl::InternalError(absl::StrCat("short write to '", path, "'"));
  }
  return absl::OkStatus();
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

absl::StatusOr<ScoreRecordSet> ParseScoreRecords(const std::string& contents,
                                                 ScoreFormat format) {
  std::vector<ScoreRecord> records;
  std::vector<size_t> record_lines;
  bool header_seen = false;
  for (const auto& [line_no, raw] : NumberedLines(contents)) {
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty()) continue;
    ScoreRecord record;
    if (format == ScoreFormat::kCsv) {
      std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
      if (!header_seen) {
        header_seen = true;
        if (cells.size() != 3 ||
            absl::StripAsciiWhitespace(cells[0]) != "sample_id" ||
            absl::StripAsciiWhitespace(cells[1]) != "score" ||
            absl::StripAsciiWhitespace(cells[2]) != "membership") {
          return LineError(line_no,
                           "expected header 'sample_id,score,membership'");
        }
        continue;
      }
      if (cells.size() != 3) {
        return LineError(line_no, "expected 3 comma-separated fields");
      }
      record.sample_id = std::string(absl::StripAsciiWhitespace(cells[0]));
      auto score = StrictDouble(cells[1]);
      if (!score.ok()) return Annotate(score.status(), line_no);
      if (!std::isfinite(*score)) {
        return LineError(line_no, "field 'score' is not finite");
      }
      record.score = *score;
      absl::string_view bit = absl::StripAsciiWhitespace(cells[2]);
      if (bit != "0" && bit != "1") {
        return LineError(line_no, "field 'membership' must be 0 or 1");
      }
      record.member = bit == "1";
    } else {
      auto parsed = ParseJson(line);
      if (!parsed.ok()) return Annotate(parsed.status(), line_no);
      if (!parsed->is_object()) return LineError(line_no, "expected object");
      auto id = Field(*parsed, "sample_id");
      if (!id.ok()) return Annotate(id.status(), line_no);
      if (!(*id)->is_string()) {
        return LineError(line_no, "field 'sample_id' must be a string");
      }
      record.sample_id = (*id)->get<std::string>();
      auto score_field = Field(*parsed, "score");
      if (!score_field.ok()) return Annotate(score_field.status(), line_no);
      auto score = JsonDouble(**score_field, "score");
      if (!score.ok()) return Annotate(score.status(), line_no);
      record.score = *score;
      auto bit_field = Field(*parsed, "membership");
      if (!bit_field.ok()) return Annotate(bit_field.status(), line_no);
      auto bit = JsonBit(**bit_field, "membership");
      if (!bit.ok()) return Annotate(bit.status(), line_no);
      record.member = *bit;
    }
    records.push_back(std::move(record));
    record_lines.push_back(line_no);
  }
  std::set<absl::string_view> seen;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!seen.insert(records[i].sample_id).second) {
      return LineError(
          record_lines[i],
          absl::StrCat("duplicate sample_id '", records[i].sample_id, "'"));
    }
  }
  return ScoreRecordSet::Create(std::move(records));
}

absl::StatusOr<ScoreRecordSet> LoadScoreRecords(const std::string& path,
                                                ScoreFormat format) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  auto set = ParseScoreRecords(*contents, format);
  if (!set.ok()) {
    return absl::Status(set.status().code(),
                        absl::StrCat(path, ": ", set.status().message()));
  }
  return set;
}

std::string SerializeScoreRecords(const ScoreRecordSet& set,
                                  ScoreFormat format) {
  std::string out;
  if (format == ScoreFormat::kCsv) {
    out = "sample_id,score,membership\n";
    for (const auto& r : set.records()) {
      absl::StrAppend(&out, r.sample_id, ",", FormatDouble(r.score), ",",
                      r.member ? "1" : "0", "\n");
    }
    return out;
  }
  for (const auto& r : set.records()) {
    // Fixed key order keeps output byte-stable.
    absl::StrAppend(&out, "{\"sample_id\":", json(r.sample_id).dump(),
                    ",\"score\":", FormatDouble(r.score),
                    ",\"membership\":", r.member ? "1" : "0", "}\n");
  }
  return out;
}

absl::StatusOr<LogitPanel> ParseLogitPanel(const std::string& contents) {
  auto parsed = ParseJson(contents);
  if (!parsed.ok()) return parsed.status();
  const json& doc = *parsed;
  if (!doc.is_object()) return absl::InvalidArgumentError("expected object");

  size_t dims[3];
  const char* dim_keys[3] = {"n_samples", "n_models", "target_index"};
  for (int d = 0; d < 3; ++d) {
    auto f = Field(doc, dim_keys[d]);
    if (!f.ok()) return f.status();
    auto v = JsonCount(**f, dim_keys[d]);
    if (!v.ok()) return v.status();
    dims[d] = *v;
  }
  const size_t n_samples = dims[0], n_models = dims[1];

  auto logits_field = Field(doc, "logits");
  if (!logits_field.ok()) return logits_field.status();
  auto mask_field = Field(doc, "membership_mask");
  if (!mask_field.ok()) return mask_field.status();
  auto truth_field = Field(doc, "true_membership");
  if (!truth_field.ok()) return truth_field.status();
  const json& logit_rows = **logits_field;
  const json& mask_rows = **mask_field;
  const json& truth = **truth_field;
  if (!logit_rows.is_array() || logit_rows.size() != n_samples ||
      !mask_rows.is_array() || mask_rows.size() != n_samples) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: logits and membership_mask need ",
                     n_samples, " rows"));
  }
  if (!truth.is_array()) {
    return absl::InvalidArgumentError("true_membership must be an array");
  }

  std::vector<double> logits;
  std::vector<uint8_t> mask;
  logits.reserve(n_samples * n_models);
  mask.reserve(n_samples * n_models);
  for (size_t i = 0; i < n_samples; ++i) {
    const json& lrow = logit_rows[i];
    const json& mrow = mask_rows[i];
    if (!lrow.is_array() || lrow.size() != n_models || !mrow.is_array() ||
        mrow.size() != n_models) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dimension mismatch: row ", i, " needs ", n_models, " entries"));
    }
    for (size_t j = 0; j < n_models; ++j) {
      auto x = JsonDouble(lrow[j], "logits");
      if (!x.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "sample ", i, " model ", j, ": ", x.status().message()));
      }
      logits.push_back(*x);
      auto b = JsonBit(mrow[j], "membership_mask");
      if (!b.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "sample ", i, " model ", j, ": ", b.status().message()));
      }
      mask.push_back(*b ? 1 : 0);
    }
  }
  std::vector<uint8_t> membership;
  membership.reserve(truth.size());
  for (size_t i = 0; i < truth.size(); ++i) {
    auto b = JsonBit(truth[i], "true_membership");
    if (!b.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", i, ": ", b.status().message()));
    }
    membership.push_back(*b ? 1 : 0);
  }
  Metadata metadata;
  if (auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) {
      if (v.is_string()) metadata[k] = v.get<std::string>();
    }
  }
  return LogitPanel::Create(n_samples, n_models, dims[2], std::move(logits),
                            std::move(mask), std::move(membership),
                            std::move(metadata));
}

absl::StatusOr<LogitPanel> LoadLogitPanel(const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  auto panel = ParseLogitPanel(*contents);
  if (!panel.ok()) {
    return absl::Status(panel.status().code(),
                        absl::StrCat(path, ": ", panel.status().message()));
  }
  return panel;
}

std::string SerializeLogitPanel(const LogitPanel& panel) {
  json doc;
  doc["n_samples"] = panel.n_samples();
  doc["n_models"] = panel.n_models();
  doc["target_index"] = panel.target_index();
  json logits = json::array();
  json mask = json::array();
  for (size_t i = 0; i < panel.n_samples(); ++i) {
    json lrow = json::array();
    json mrow = json::array();
    for (size_t j = 0; j < panel.n_models(); ++j) {
      lrow.push_back(DoubleToJson(panel.logit(i, j)));
      mrow.push_back(panel.in_model(i, j) ? 1 : 0);
    }
    logits.push_back(std::move(lrow));
    mask.push_back(std::move(mrow));
  }
  doc["logits"] = std::move(logits);
  doc["membership_mask"] = std::move(mask);
  json truth = json::array();
  for (uint8_t b : panel.true_membership()) truth.push_back(b ? 1 : 0);
  doc["true_membership"] = std::move(truth);
  if (!panel.metadata().empty()) doc["metadata"] = panel.metadata();
  return doc.dump() + "\n";
}

absl::StatusOr<std::vector<TokenTrace>> ParseTokenTraces(
    const std::string& contents) {
  std::vector<TokenTrace> traces;
  std::set<std::string> ids;
  for (const auto& [line_no, raw] : NumberedLines(contents)) {
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty()) continue;
    auto parsed = ParseJson(line);
    if (!parsed.ok()) return Annotate(parsed.status(), line_no);
    const json& doc = *parsed;
    if (!doc.is_object()) return LineError(line_no, "expected object");
    TokenTrace trace;
    if (auto it = doc.find("id"); it != doc.end()) {
      if (!it->is_string()) {
        return LineError(line_no, "field 'id' must be a string");
      }
      trace.id = it->get<std::string>();
    } else {
      trace.id = absl::StrCat("trace-", traces.size());
    }
    if (!ids.insert(trace.id).second) {
      return LineError(line_no, absl::StrCat("duplicate id '", trace.id, "'"));
    }
    if (auto it = doc.find("coverage_floor"); it != doc.end()) {
      auto floor = JsonDouble(*it, "coverage_floor");
      if (!floor.ok()) return Annotate(floor.status(), line_no);
      trace.coverage_floor = *floor;
    }
    if (auto it = doc.find("vocab_size"); it != doc.end()) {
      auto v = JsonCount(*it, "vocab_size");
      if (!v.ok()) return Annotate(v.status(), line_no);
      trace.vocab_size = *v;
    }
    auto steps = Field(doc, "steps");
    if (!steps.ok()) return Annotate(steps.status(), line_no);
    if (!(*steps)->is_array()) {
      return LineError(line_no, "field 'steps' must be an array");
    }
    for (const json& s : **steps) {
      if (!s.is_object()) return LineError(line_no, "step must be an object");
      TraceStep step;
      auto token = Field(s, "target_token");
      if (!token.ok()) return Annotate(token.status(), line_no);
      if (!(*token)->is_number_integer()) {
        return LineError(line_no, "field 'target_token' must be an integer");
      }
      step.target_token = (*token)->get<int64_t>();
      auto prob = Field(s, "target_prob");
      if (!prob.ok()) return Annotate(prob.status(), line_no);
      auto p = JsonDouble(**prob, "target_prob");
      if (!p.ok()) return Annotate(p.status(), line_no);
      step.target_prob = *p;
      auto rank = Field(s, "target_rank");
      if (!rank.ok()) return Annotate(rank.status(), line_no);
      auto r = JsonCount(**rank, "target_rank");
      if (!r.ok()) return Annotate(r.status(), line_no);
      step.target_rank = *r;
      auto probs = Field(s, "sorted_probs");
      if (!probs.ok()) return Annotate(probs.status(), line_no);
      if (!(*probs)->is_array()) {
        return LineError(line_no, "field 'sorted_probs' must be an array");
      }
      for (const json& q : **probs) {
        auto v = JsonDouble(q, "sorted_probs");
        if (!v.ok()) return Annotate(v.status(), line_no);
        step.sorted_probs.push_back(*v);
      }
      trace.steps.push_back(std::move(step));
    }
    if (absl::Status s = trace.Validate(); !s.ok()) return Annotate(s, line_no);
    traces.push_back(std::move(trace));
  }
  return traces;
}

absl::StatusOr<std::vector<TokenTrace>> LoadTokenTraces(
    const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  auto traces = ParseTokenTraces(*contents);
  if (!traces.ok()) {
    return absl::Status(traces.status().code(),
                        absl::StrCat(path, ": ", traces.status().message()));
  }
  return traces;
}

std::string SerializeTokenTraces(const std::vector<TokenTrace>& traces) {
  std::string out;
  for (const auto& trace : traces) {
    json doc;
    doc["id"] = trace.id;
    doc["coverage_floor"] = trace.coverage_floor;
    if (trace.vocab_size) doc["vocab_size"] = *trace.vocab_size;
    json steps = json::array();
    for (const auto& s : trace.steps) {
      json step;
      step["target_token"] = s.target_token;
      step["target_prob"] = s.target_prob;
      step["target_rank"] = s.target_rank;
      step["sorted_probs"] = s.sorted_probs;
      steps.push_back(std::move(step));
    }
    doc["steps"] = std::move(steps);
    absl::StrAppend(&out, doc.dump(), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<CompletionRecord>> ParseCompletions(
    const std::string& contents) {
  std::vector<CompletionRecord> records;
  for (const auto& [line_no, raw] : NumberedLines(contents)) {
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty()) continue;
    auto parsed = ParseJson(line);
    if (!parsed.ok()) return Annotate(parsed.status(), line_no);
    const json& doc = *parsed;
    if (!doc.is_object()) return LineError(line_no, "expected object");
    CompletionRecord record;
    for (const char* key : {"id", "scheme"}) {
      auto f = Field(doc, key);
      if (!f.ok()) return Annotate(f.status(), line_no);
      if (!(*f)->is_string()) {
        return LineError(line_no,
                         absl::StrCat("field '", key, "' must be a string"));
      }
      (absl::string_view(key) == "id" ? record.id : record.scheme) =
          (*f)->get<std::string>();
    }
    for (const char* key : {"generated", "target"}) {
      auto f = Field(doc, key);
      if (!f.ok()) return Annotate(f.status(), line_no);
      auto tokens = JsonTokens(**f, key);
      if (!tokens.ok()) return Annotate(tokens.status(), line_no);
      if (tokens->empty()) {
        return LineError(line_no,
                         absl::StrCat("field '", key, "' must be nonempty"));
      }
      (absl::string_view(key) == "generated" ? record.generated
                                             : record.target) =
          std::move(*tokens);
    }
    records.push_back(std::move(record));
  }
  return records;
}

absl::StatusOr<std::vector<CompletionRecord>> LoadCompletions(
    const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  auto records = ParseCompletions(*contents);
  if (!records.ok()) {
    return absl::Status(records.status().code(),
                        absl::StrCat(path, ": ", records.status().message()));
  }
  return records;
}

std::string SerializeCompletions(const std::vector<CompletionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json doc;
    doc["id"] = r.id;
    doc["scheme"] = r.scheme;
    doc["generated"] = r.generated;
    doc["target"] = r.target;
    absl::StrAppend(&out, doc.dump(), "\n");
  }
  return out;
}

}  // namespace privaudit
