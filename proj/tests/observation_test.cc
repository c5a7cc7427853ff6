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

#include <limits>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "privaudit/synthetic.h"
#include "test_util.h"

namespace privaudit {
namespace {

using ::testing::HasSubstr;
using testing::MakeSet;
using testing::TempPath;

TEST(ScoreRecordsTest, ParsesMinimalJsonl) {
  auto set = ParseScoreRecords(
      "{\"sample_id\":\"a\",\"score\":0.9,\"membership\":1}\n"
      "{\"sample_id\":\"b\",\"score\":0.1,\"membership\":0}\n",
      ScoreFormat::kJsonl);
  ASSERT_OK(set);
  ASSERT_EQ(set->size(), 2u);
  EXPECT_EQ(set->num_members(), 1u);
  EXPECT_EQ(set->records()[0].sample_id, "a");
  EXPECT_DOUBLE_EQ(set->records()[0].score, 0.9);
}

TEST(ScoreRecordsTest, RejectsNanNamingTheLine) {
  auto set = ParseScoreRecords(
      "{\"sample_id\":\"a\",\"score\":0.9,\"membership\":1}\n"
      "{\"sample_id\":\"b\",\"score\":\"NaN\",\"membership\":0}\n",
      ScoreFormat::kJsonl);
  ASSERT_FALSE(set.ok());
  EXPECT_EQ(set.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(set.status().message()), HasSubstr("line 2"));
}

TEST(ScoreRecordsTest, RejectsDuplicateIdsAndBadMembership) {
  EXPECT_FALSE(
      ParseScoreRecords("{\"sample_id\":\"a\",\"score\":1,\"membership\":1}\n"
                        "{\"sample_id\":\"a\",\"score\":2,\"membership\":0}\n",
                        ScoreFormat::kJsonl)
          .ok());
  EXPECT_FALSE(
      ParseScoreRecords("{\"sample_id\":\"a\",\"score\":1,\"membership\":2}\n",
                        ScoreFormat::kJsonl)
          .ok());
}

TEST(ScoreRecordsTest, CsvWithTwoThousandRows) {
  std::string csv = "sample_id,score,membership\n";
  for (int i = 0; i < 2000; ++i) {
    absl::StrAppend(&csv, "c", i, ",", i * 0.5, ",", i < 1000 ? 1 : 0, "\n");
  }
  auto set = ParseScoreRecords(csv, ScoreFormat::kCsv);
  ASSERT_OK(set);
  EXPECT_EQ(set->size(), 2000u);
  EXPECT_EQ(set->num_members(), 1000u);
  EXPECT_EQ(set->num_nonmembers(), 1000u);
}

TEST(ScoreRecordsTest, CsvRequiresHeader) {
  auto set = ParseScoreRecords("a,1,1\n", ScoreFormat::kCsv);
  EXPECT_FALSE(set.ok());
}

TEST(ScoreRecordsTest, RoundTripsBothFormats) {
  auto original = GenShiftedGaussianScores({50, 1.5, 0.7, 11});
  ASSERT_OK(original);
  for (ScoreFormat format : {ScoreFormat::kJsonl, ScoreFormat::kCsv}) {
    auto again =
        ParseScoreRecords(SerializeScoreRecords(*original, format), format);
    ASSERT_OK(again);
    ASSERT_EQ(again->size(), original->size());
    for (size_t i = 0; i < original->size(); ++i) {
      EXPECT_EQ(again->records()[i].sample_id,
                original->records()[i].sample_id);
      EXPECT_EQ(again->records()[i].score, original->records()[i].score);
      EXPECT_EQ(again->records()[i].member, original->records()[i].member);
    }
  }
}

TEST(ScoreRecordsTest, MissingFileIsNotFound) {
  auto set = LoadScoreRecords("/nonexistent/scores.jsonl", ScoreFormat::kJsonl);
  EXPECT_EQ(set.status().code(), absl::StatusCode::kNotFound);
}

TEST(ScoreRecordsTest, FormatFromExtension) {
  EXPECT_EQ(ScoreFormatFromPath("x.CSV"), ScoreFormat::kCsv);
  EXPECT_EQ(ScoreFormatFromPath("x.jsonl"), ScoreFormat::kJsonl);
}

TEST(ScoreRecordsTest, BothClassCheck) {
  EXPECT_OK(MakeSet({1}, {0}).RequireBothClasses());
  EXPECT_FALSE(MakeSet({1, 2}, {}).RequireBothClasses().ok());
}

std::string PanelJson(int n, int k, int target,
                      const std::string& membership_override = "") {
  std::vector<std::string> logits, mask;
  std::vector<int> membership;
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> lrow, mrow;
    for (int j = 0; j < k; ++j) {
      lrow.push_back(absl::StrCat(0.1 * (i + j)));
      const int in = (i + j) % 2;
      mrow.push_back(absl::StrCat(in));
      if (j == target) membership.push_back(in);
    }
    logits.push_back("[" + absl::StrJoin(lrow, ",") + "]");
    mask.push_back("[" + absl::StrJoin(mrow, ",") + "]");
  }
  std::string m = membership_override.empty()
                      ? "[" + absl::StrJoin(membership, ",") + "]"
                      : membership_override;
  return absl::StrCat(
      "{\"n_samples\":", n, ",\"n_models\":", k, ",\"target_index\":", target,
      ",\"logits\":[", absl::StrJoin(logits, ","), "],\"membership_mask\":[",
      absl::StrJoin(mask, ","), "],\"true_membership\":", m, "}");
}

TEST(LogitPanelTest, EightModelPanel) {
  auto panel = ParseLogitPanel(PanelJson(4, 8, 0));
  ASSERT_OK(panel);
  EXPECT_EQ(panel->n_samples(), 4u);
  EXPECT_EQ(panel->n_models(), 8u);
  EXPECT_DOUBLE_EQ(panel->logit(2, 3), 0.5);
  EXPECT_TRUE(panel->in_model(0, 1));
}

TEST(LogitPanelTest, SmallestPanel) {
  EXPECT_OK(ParseLogitPanel(PanelJson(1, 2, 0)));
}

TEST(LogitPanelTest, RejectsMembershipMismatch) {
  auto panel = ParseLogitPanel(PanelJson(2, 3, 0, "[1,1]"));
  ASSERT_FALSE(panel.ok());
  EXPECT_THAT(std::string(panel.status().message()), HasSubstr("sample 0"));
}

TEST(LogitPanelTest, RejectsShapeMismatch) {
  std::string bad = PanelJson(2, 3, 0);
  bad.replace(bad.find("\"n_models\":3"), 12, "\"n_models\":4");
  EXPECT_FALSE(ParseLogitPanel(bad).ok());
}

TEST(LogitPanelTest, RoundTrip) {
  auto panel = GenLogitPanel(20, 5, 1.0, -1.0, 0.8, 3);
  ASSERT_OK(panel);
  auto again = ParseLogitPanel(SerializeLogitPanel(*panel));
  ASSERT_OK(again);
  EXPECT_EQ(again->logits(), panel->logits());
  EXPECT_EQ(again->membership_mask(), panel->membership_mask());
  EXPECT_EQ(again->true_membership(), panel->true_membership());
  EXPECT_EQ(SerializeLogitPanel(*again), SerializeLogitPanel(*panel));
}

TEST(GuessSummaryTest, Validation) {
  EXPECT_OK((GuessSummary{10, 5, 5, GuessStrategy::kOneSided}.Validate()));
  EXPECT_FALSE(
      (GuessSummary{10, 5, 6, GuessStrategy::kOneSided}.Validate()).ok());
  EXPECT_FALSE(
      (GuessSummary{10, 11, 0, GuessStrategy::kOneSided}.Validate()).ok());
}

TraceStep Step(double prob, size_t rank, std::vector<double> sorted) {
  return {7, prob, rank, std::move(sorted)};
}

TEST(TokenTraceTest, ValidatesSteps) {
  TokenTrace trace{"t", {Step(0.3, 2, {0.5, 0.3, 0.2})}, 0.9999, std::nullopt};
  EXPECT_OK(trace.Validate());

  TokenTrace unsorted = trace;
  unsorted.steps[0].sorted_probs = {0.3, 0.5, 0.2};
  EXPECT_FALSE(unsorted.Validate().ok());

  TokenTrace low_cover = trace;
  low_cover.steps[0].sorted_probs = {0.5, 0.3};
  EXPECT_FALSE(low_cover.Validate().ok());
  low_cover.coverage_floor = 0.8;
  EXPECT_OK(low_cover.Validate());

  TokenTrace wrong_prob = trace;
  wrong_prob.steps[0].target_prob = 0.25;
  EXPECT_FALSE(wrong_prob.Validate().ok());

  TokenTrace empty{"e", {}, 0.9999, std::nullopt};
  EXPECT_FALSE(empty.Validate().ok());
}

TEST(TokenTraceTest, RoundTripAndErrorsNameTheLine) {
  std::vector<TokenTrace> traces = {
      {"a",
       {Step(0.5, 1, {0.5, 0.3, 0.2}), Step(0.2, 3, {0.5, 0.3, 0.2})},
       1.0,
       3},
      {"b", {Step(0.05, 4, {0.6, 0.3, 0.05})}, 0.95, std::nullopt}};
  auto again = ParseTokenTraces(SerializeTokenTraces(traces));
  ASSERT_OK(again);
  EXPECT_EQ(*again, traces);

  auto bad = ParseTokenTraces(
      SerializeTokenTraces(traces) +
      "{\"steps\":[{\"target_token\":1,\"target_prob\":2,\"target_rank\":1,"
      "\"sorted_probs\":[1]}]}\n");
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(std::string(bad.status().message()), HasSubstr("line 3"));
}

TEST(CompletionTest, RoundTrip) {
  std::vector<CompletionRecord> records = {{"x", "greedy", {1, 2, 3}, {2, 3}},
                                           {"y", "top_k:2", {4}, {4}}};
  auto again = ParseCompletions(SerializeCompletions(records));
  ASSERT_OK(again);
  EXPECT_EQ(*again, records);
}

TEST(FileIoTest, WriteThenRead) {
  const std::string path = TempPath("file.txt");
  ASSERT_OK(WriteFile(path, "hello\n"));
  auto contents = ReadFile(path);
  ASSERT_OK(contents);
  EXPECT_EQ(*contents, "hello\n");
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(2.0), "2");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(FormatDouble(x)), x);
}

}  // namespace
}  // namespace privaudit
