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

// Audit report cards.
//
// A report is a list of analyses, each carrying the configuration that
// produced its numbers. Infinite values are written as the strings "+inf" and
// "-inf" because JSON has no literal for them.

#ifndef PRIVAUDIT_REPORT_H_
#define PRIVAUDIT_REPORT_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "privaudit/bootstrap.h"
#include "privaudit/extraction.h"
#include "privaudit/guess_audit.h"
#include "privaudit/observation.h"

namespace privaudit {

inline constexpr char kToolName[] = "privaudit";
inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct Analysis {
  std::string name;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> warnings;
};

struct AuditReport {
  std::string tool_version = kToolVersion;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Analysis> analyses;
};

enum class ReportFormat { kJson, kMarkdown };

absl::StatusOr<ReportFormat> ParseReportFormat(const std::string& name);

// Finite values as numbers, infinities as "+inf" / "-inf".
nlohmann::json JsonNumber(double value);

nlohmann::json ReportToJson(const AuditReport& report);
absl::StatusOr<AuditReport> ReportFromJson(const std::string& text);
std::string RenderReport(const AuditReport& report, ReportFormat format);

Analysis ScoreSetAnalysis(const std::string& name, const ScoreRecordSet& set);
Analysis MetricsAnalysis(const ScoreRecordSet& set, double delta,
                         std::optional<double> tpr_target);
Analysis BootstrapAnalysis(const BootstrapAudit& audit);
Analysis GuessAnalysis(const SweepResult& sweep, const GuessAuditConfig& config,
                       size_t m);
Analysis ExtractionAnalysis(const RateTable& table,
                            const std::vector<NpPoint>& curve,
                            const std::vector<uint64_t>& n_grid,
                            const std::vector<double>& p_targets);

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Self-contained SVG line chart. Non-finite points are dropped.
std::string SvgLineChart(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<ChartSeries>& series,
                         bool log_x = false);

}  // namespace privaudit

#endif  // PRIVAUDIT_REPORT_H_
