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

#include "privaudit/report.h"

#include <cmath>
#include <limits>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "privaudit/synthetic.h"
#include "test_util.h"

namespace privaudit {
namespace {

using ::testing::HasSubstr;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(JsonNumberTest, Sentinels) {
  EXPECT_EQ(JsonNumber(kInf), "+inf");
  EXPECT_EQ(JsonNumber(-kInf), "-inf");
  EXPECT_EQ(JsonNumber(1.5), 1.5);
}

TEST(ReportFormatTest, Parse) {
  EXPECT_EQ(*ParseReportFormat("json"), ReportFormat::kJson);
  EXPECT_EQ(*ParseReportFormat("md"), ReportFormat::kMarkdown);
  EXPECT_FALSE(ParseReportFormat("html").ok());
}

AuditReport SampleReport() {
  AuditReport report;
  report.command = "audit";
  report.config = {{"seed", 3}};
  Analysis a;
  a.name = "metrics";
  a.config = {{"delta", 0.0}};
  a.results = {{"auc", 0.75}, {"epsilon", JsonNumber(kInf)}};
  a.warnings = {"one round degenerate"};
  report.analyses.push_back(a);
  return report;
}

TEST(ReportTest, JsonRoundTrip) {
  const AuditReport report = SampleReport();
  const std::string text = RenderReport(report, ReportFormat::kJson);
  auto again = ReportFromJson(text);
  ASSERT_OK(again);
  EXPECT_EQ(RenderReport(*again, ReportFormat::kJson), text);
  const nlohmann::json j = ReportToJson(report);
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["tool"]["name"], "privaudit");
  EXPECT_EQ(j["analyses"][0]["results"]["epsilon"], "+inf");
  EXPECT_FALSE(ReportFromJson("{").ok());
  EXPECT_FALSE(ReportFromJson("[1]").ok());
}

TEST(ReportTest, MarkdownCarriesWarningsAndConfig) {
  const std::string md = RenderReport(SampleReport(), ReportFormat::kMarkdown);
  EXPECT_THAT(md, HasSubstr("## Configuration"));
  EXPECT_THAT(md, HasSubstr("one round degenerate"));
  EXPECT_THAT(md, HasSubstr("+inf"));
  EXPECT_THAT(md, HasSubstr("seed"));
}

TEST(ReportTest, EmptyReportStillHasSections) {
  AuditReport report;
  report.command = "noop";
  const std::string md = RenderReport(report, ReportFormat::kMarkdown);
  EXPECT_THAT(md, HasSubstr("## Configuration"));
  EXPECT_THAT(md, HasSubstr("## Analyses"));
  EXPECT_THAT(md, HasSubstr("## Warnings"));
  EXPECT_THAT(md, HasSubstr("None."));
  auto again = ReportFromJson(RenderReport(report, ReportFormat::kJson));
  ASSERT_OK(again);
  EXPECT_TRUE(again->analyses.empty());
}

TEST(ReportTest, BootstrapAnalysisFields) {
  auto set = GenShiftedGaussianScores({100, 2.0, 1.0, 1});
  ASSERT_OK(set);
  BootstrapConfig config;
  config.k = 50;
  auto audit = RunBootstrapAudit(*set, config, 0.01);
  ASSERT_OK(audit);
  const Analysis a = BootstrapAnalysis(*audit);
  EXPECT_EQ(a.results["final_epsilon"]["rule"], "max_upper");
  EXPECT_EQ(a.results["conservative_epsilon"]["rule"], "max_lower");
  EXPECT_EQ(a.results["auc"]["k"], 50);
  EXPECT_EQ(a.results["auc"]["resampling"], "with_replacement");
  EXPECT_TRUE(a.results.contains("epsilon_at_tpr"));
  EXPECT_EQ(a.results["epsilon_by_threshold"].size(), audit->thresholds.size());
}

TEST(ReportTest, GuessAnalysisFields) {
  auto set = GenShiftedGaussianScores({200, 3.0, 1.0, 2});
  ASSERT_OK(set);
  GuessAuditConfig config;
  auto sweep = Sweep(*set, config);
  ASSERT_OK(sweep);
  const Analysis a = GuessAnalysis(*sweep, config, set->size());
  EXPECT_EQ(a.results["best"]["epsilon"], sweep->best.epsilon);
  EXPECT_EQ(a.results["sweep"].size(), sweep->table.size());
}

TEST(SvgTest, ProducesSvgAndDropsNonFinite) {
  const std::string svg = SvgLineChart(
      "ROC", "fpr", "tpr", {{"attack", {{0, 0}, {0.5, kInf}, {1, 1}}}}, false);
  EXPECT_THAT(svg, HasSubstr("<svg"));
  EXPECT_THAT(svg, HasSubstr("</svg>"));
  EXPECT_THAT(svg, ::testing::Not(HasSubstr("inf")));
}

}  // namespace
}  // namespace privaudit
