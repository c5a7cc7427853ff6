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

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_replace.h"
#include "privaudit/roc.h"

namespace privaudit {
namespace {

using nlohmann::json;

json Fragment(const IntervalReport& r, const BootstrapConfig& config) {
  return {{"metric", r.metric},
          {"point", JsonNumber(r.point)},
          {"lower", JsonNumber(r.lower)},
          {"upper", JsonNumber(r.upper)},
          {"rounds_used", r.rounds_used},
          {"k", config.k},
          {"confidence", config.confidence},
          {"delta", config.delta},
          {"resampling", ResamplingName(config.resampling)}};
}

json MetadataJson(const Metadata& metadata) {
  json j = json::object();
  for (const auto& [key, value] : metadata) j[key] = value;
  return j;
}

std::string Scalar(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return FormatDouble(j.get<double>());
  if (j.is_null()) return "-";
  return j.dump();
}

std::string Cell(const json& j) {
  std::string s = j.is_structured() ? j.dump() : Scalar(j);
  return absl::StrReplaceAll(s, {{"|", "\\|"}, {"\n", " "}});
}

bool IsTable(const json& j) {
  if (!j.is_array() || j.empty()) return false;
  return std::all_of(j.begin(), j.end(),
                     [](const json& e) { return e.is_object(); });
}

void RenderValue(const std::string& key, const json& value, int depth,
                 std::string& out);

void RenderTable(const json& rows, std::string& out) {
  std::vector<std::string> columns;
  for (const json& row : rows) {
    for (const auto& item : row.items()) {
      if (std::find(columns.begin(), columns.end(), item.key()) ==
          columns.end()) {
        columns.push_back(item.key());
      }
    }
  }
  absl::StrAppend(&out, "| ", absl::StrJoin(columns, " | "), " |\n|");
  for (size_t i = 0; i < columns.size(); ++i) out += " --- |";
  out += "\n";
  for (const json& row : rows) {
    std::vector<std::string> cells;
    for (const std::string& c : columns) {
      cells.push_back(row.contains(c) ? Cell(row[c]) : "");
    }
    absl::StrAppend(&out, "| ", absl::StrJoin(cells, " | "), " |\n");
  }
  out += "\n";
}

void RenderObject(const json& object, int depth, std::string& out) {
  // Scalars first as a bullet list, then nested structures.
  bool any_scalar = false;
  for (const auto& item : object.items()) {
    const json& v = item.value();
    const bool scalar_list =
        v.is_array() && std::none_of(v.begin(), v.end(), [](const json& e) {
          return e.is_structured();
        });
    if (v.is_structured() && !scalar_list) continue;
    std::string text;
    if (v.is_array()) {
      std::vector<std::string> parts;
      for (const json& e : v) parts.push_back(Scalar(e));
      text = absl::StrJoin(parts, ", ");
    } else {
      text = Scalar(v);
    }
    absl::StrAppend(&out, "- ", item.key(), ": ", text, "\n");
    any_scalar = true;
  }
  if (any_scalar) out += "\n";
  for (const auto& item : object.items()) {
    const json& v = item.value();
    if (v.is_object() || IsTable(v)) RenderValue(item.key(), v, depth, out);
  }
}

void RenderValue(const std::string& key, const json& value, int depth,
                 std::string& out) {
  absl::StrAppend(&out, std::string(std::min(depth, 6), '#'), " ", key, "\n\n");
  if (IsTable(value)) {
    RenderTable(value, out);
  } else if (value.is_object()) {
    RenderObject(value, depth + 1, out);
  } else {
    absl::StrAppend(&out, Scalar(value), "\n\n");
  }
}

std::string RenderMarkdown(const AuditReport& report) {
  std::string out = absl::StrCat("# ", kToolName, " audit report\n\n");
  absl::StrAppend(&out, "- tool_version: ", report.tool_version, "\n",
                  "- command: ", report.command, "\n\n");
  out += "## Configuration\n\n";
  RenderObject(report.config, 3, out);
  out += "## Analyses\n\n";
  for (const Analysis& a : report.analyses) {
    absl::StrAppend(&out, "### ", a.name, "\n\n");
    RenderValue("Configuration", a.config, 4, out);
    RenderValue("Results", a.results, 4, out);
  }
  out += "## Warnings\n\n";
  bool any = false;
  for (const Analysis& a : report.analyses) {
    for (const std::string& w : a.warnings) {
      absl::StrAppend(&out, "- [", a.name, "] ", w, "\n");
      any = true;
    }
  }
  out += any ? "\n" : "None.\n";
  return out;
}

std::string Escape(const std::string& s) {
  return absl::StrReplaceAll(
      s, {{"&", "&amp;"}, {"<", "&lt;"}, {">", "&gt;"}, {"\"", "&quot;"}});
}

}  // namespace

absl::StatusOr<ReportFormat> ParseReportFormat(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown report format '", name, "'"));
}

json JsonNumber(double value) {
  if (value == std::numeric_limits<double>::infinity()) return "+inf";
  if (value == -std::numeric_limits<double>::infinity()) return "-inf";
  return value;
}

json ReportToJson(const AuditReport& report) {
  json analyses = json::array();
  for (const Analysis& a : report.analyses) {
    analyses.push_back({{"name", a.name},
                        {"config", a.config},
                        {"results", a.results},
                        {"warnings", a.warnings}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"tool", {{"name", kToolName}, {"version", report.tool_version}}},
          {"command", report.command},
          {"config", report.config},
          {"analyses", analyses}};
}

absl::StatusOr<AuditReport> ReportFromJson(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError("report is not valid JSON");
  }
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      return absl::InvalidArgumentError("unsupported report schema_version");
    }
    AuditReport report;
    report.tool_version = j.at("tool").at("version").get<std::string>();
    report.command = j.at("command").get<std::string>();
    report.config = j.at("config");
    for (const json& a : j.at("analyses")) {
      report.analyses.push_back(
          {a.at("name").get<std::string>(), a.at("config"), a.at("results"),
           a.at("warnings").get<std::vector<std::string>>()});
    }
    return report;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed report: ", e.what()));
  }
}

std::string RenderReport(const AuditReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    return ReportToJson(report).dump(2) + "\n";
  }
  return RenderMarkdown(report);
}

Analysis ScoreSetAnalysis(const std::string& name, const ScoreRecordSet& set) {
  Analysis a;
  a.name = name;
  a.config = MetadataJson(set.metadata());
  a.results = {{"records", set.size()},
               {"members", set.num_members()},
               {"nonmembers", set.num_nonmembers()}};
  if (auto auc = Auc(set); auc.ok()) {
    a.results["auc"] = *auc;
  } else {
    a.warnings.push_back("AUC unavailable: " +
                         std::string(auc.status().message()));
  }
  return a;
}

Analysis MetricsAnalysis(const ScoreRecordSet& set, double delta,
                         std::optional<double> tpr_target) {
  Analysis a;
  a.name = "metrics";
  a.config = {{"delta", delta}, {"guess_rule", "score >= threshold"}};
  a.results = {{"records", set.size()},
               {"members", set.num_members()},
               {"nonmembers", set.num_nonmembers()}};
  if (auto auc = Auc(set); auc.ok()) a.results["auc"] = *auc;
  if (auto best = BestAccuracy(set); best.ok()) {
    a.results["accuracy"] = best->accuracy;
    a.results["accuracy_threshold"] = JsonNumber(best->threshold);
  }
  if (auto curve = RocCurve(set); curve.ok()) {
    a.results["roc_points"] = curve->size();
  }
  if (tpr_target) {
    a.config["tpr_target"] = *tpr_target;
    if (auto e = EpsilonAtTpr(set, *tpr_target, delta); e.ok()) {
      a.results["epsilon_at_tpr"] = {{"tpr", *tpr_target},
                                     {"threshold", JsonNumber(e->threshold)},
                                     {"epsilon", JsonNumber(e->epsilon)}};
    }
  }
  return a;
}

Analysis BootstrapAnalysis(const BootstrapAudit& audit) {
  const BootstrapConfig& c = audit.config;
  Analysis a;
  a.name = "bootstrap";
  a.config = {{"k", c.k},
              {"confidence", c.confidence},
              {"delta", c.delta},
              {"seed", c.seed},
              {"resampling", ResamplingName(c.resampling)},
              {"m", audit.m},
              {"thresholds", audit.thresholds.size()}};
  json by_tau = json::array();
  for (size_t t = 0; t < audit.thresholds.size(); ++t) {
    const auto& r = audit.epsilon_by_threshold[t];
    if (!r) continue;
    json f = Fragment(*r, c);
    f["threshold"] = JsonNumber(audit.thresholds[t]);
    by_tau.push_back(std::move(f));
  }
  const FinalEpsilon& fe = audit.final_epsilon;
  a.results = {{"auc", Fragment(audit.auc, c)},
               {"accuracy", Fragment(audit.accuracy, c)},
               {"final_epsilon",
                {{"rule", "max_upper"},
                 {"threshold", JsonNumber(fe.upper_rule.threshold)},
                 {"epsilon", JsonNumber(fe.upper_rule.epsilon)}}},
               {"excluded_thresholds", fe.excluded},
               {"degenerate_rounds", audit.degenerate_rounds},
               {"epsilon_by_threshold", by_tau}};
  if (fe.lower_rule) {
    a.results["conservative_epsilon"] = {
        {"rule", "max_lower"},
        {"threshold", JsonNumber(fe.lower_rule->threshold)},
        {"epsilon", JsonNumber(fe.lower_rule->epsilon)}};
  }
  if (audit.tpr_target) a.config["tpr_target"] = *audit.tpr_target;
  if (audit.epsilon_at_tpr) {
    a.results["epsilon_at_tpr"] = Fragment(*audit.epsilon_at_tpr, c);
  }
  a.warnings = audit.warnings;
  return a;
}

Analysis GuessAnalysis(const SweepResult& sweep, const GuessAuditConfig& config,
                       size_t m) {
  Analysis a;
  a.name = "guess_audit";
  std::vector<std::string> strategies;
  for (GuessStrategy s : config.strategies) {
    strategies.push_back(GuessStrategyName(s));
  }
  if (strategies.empty()) strategies = {"one_sided", "two_sided"};
  a.config = {
      {"delta", config.delta},       {"significance", config.significance},
      {"grid_min", config.grid_min}, {"grid_points", config.grid_points},
      {"bound", sweep.bound_name},   {"bonferroni", config.bonferroni},
      {"strategies", strategies},    {"m", m}};
  json table = json::array();
  for (const SweepRow& row : sweep.table) {
    table.push_back({{"strategy", GuessStrategyName(row.summary.strategy)},
                     {"c_hat", row.summary.c_hat},
                     {"c", row.summary.c},
                     {"epsilon", JsonNumber(row.epsilon)}});
  }
  a.results = {{"row_significance", sweep.row_significance},
               {"best",
                {{"strategy", GuessStrategyName(sweep.best.summary.strategy)},
                 {"c_hat", sweep.best.summary.c_hat},
                 {"c", sweep.best.summary.c},
                 {"epsilon", JsonNumber(sweep.best.epsilon)}}},
               {"sweep", table}};
  return a;
}

Analysis ExtractionAnalysis(const RateTable& table,
                            const std::vector<NpPoint>& curve,
                            const std::vector<uint64_t>& n_grid,
                            const std::vector<double>& p_targets) {
  Analysis a;
  a.name = "extraction";
  std::vector<std::string> schemes;
  for (const RateRow& row : table.rows) schemes.push_back(row.scheme);
  a.config = {{"schemes", schemes},
              {"predicates", table.predicates},
              {"pz_thresholds", table.pz_thresholds},
              {"n_grid", n_grid},
              {"p_targets", p_targets}};
  json rows = json::array();
  for (const RateRow& row : table.rows) {
    json r = {{"scheme", row.scheme},
              {"completions", row.completions},
              {"traces", row.traces}};
    for (const auto& [label, rate] : row.match_rates) r[label] = rate;
    if (row.traces > 0) {
      for (const auto& [threshold, rate] : row.pz_rates) {
        r["pz>" + FormatDouble(threshold)] = rate;
      }
      r["mean_pz"] = row.mean_pz;
      r["max_truncation_error"] = row.max_truncation_error;
      if (row.max_truncation_error > 0.0) {
        a.warnings.push_back(absl::StrCat(
            row.scheme, ": truncated traces leave p_z uncertain by up to ",
            FormatDouble(row.max_truncation_error)));
      }
    }
    rows.push_back(std::move(r));
  }
  json points = json::array();
  for (const NpPoint& p : curve) {
    points.push_back({{"n", p.n}, {"p", p.p}, {"fraction", p.fraction}});
  }
  a.results = {{"rates", rows}, {"np_curve", points}};
  return a;
}

std::string SvgLineChart(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<ChartSeries>& series, bool log_x) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 150,
                   kTop = 40, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0,
         y1 = -x0;
  for (const ChartSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y) || (log_x && x <= 0)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x0 == x1) x0 -= 0.5, x1 += 0.5;
  if (y0 == y1) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };
  auto fmt = [](double v) { return absl::StrFormat("%.2f", v); };

  std::string out =
      absl::StrCat("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"", kWidth,
                   "\" height=\"", kHeight,
                   "\" font-family=\"sans-serif\" font-size=\"12\">\n",
                   "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
                   "<text x=\"", kWidth / 2,
                   "\" y=\"20\" text-anchor=\"middle\" "
                   "font-size=\"14\">",
                   Escape(title), "</text>\n", "<rect x=\"", kLeft, "\" y=\"",
                   kTop, "\" width=\"", pw, "\" height=\"", ph,
                   "\" fill=\"none\" stroke=\"black\"/>\n");
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double gx = kLeft + pw * i / 4.0, gy = kTop + ph * (1 - i / 4.0);
    absl::StrAppend(
        &out, "<text x=\"", fmt(gx), "\" y=\"", fmt(kTop + ph + 16),
        "\" text-anchor=\"middle\">",
        FormatDouble(std::round((log_x ? std::pow(10, fx) : fx) * 1000) / 1000),
        "</text>\n<text x=\"", fmt(kLeft - 6), "\" y=\"", fmt(gy + 4),
        "\" text-anchor=\"end\">", FormatDouble(std::round(fy * 1000) / 1000),
        "</text>\n");
  }
  absl::StrAppend(&out, "<text x=\"", fmt(kLeft + pw / 2), "\" y=\"",
                  fmt(kHeight - 12), "\" text-anchor=\"middle\">",
                  Escape(x_label), log_x ? " (log scale)" : "", "</text>\n",
                  "<text transform=\"translate(16,", fmt(kTop + ph / 2),
                  ") rotate(-90)\" text-anchor=\"middle\">", Escape(y_label),
                  "</text>\n");
  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 8];
    std::vector<std::string> coords;
    for (const auto& [x, y] : series[s].points) {
      if (!std::isfinite(x) || !std::isfinite(y) || (log_x && x <= 0)) continue;
      coords.push_back(absl::StrCat(fmt(px(x)), ",", fmt(py(y))));
    }
    absl::StrAppend(&out, "<polyline fill=\"none\" stroke=\"", color,
                    "\" stroke-width=\"1.5\" points=\"",
                    absl::StrJoin(coords, " "), "\"/>\n");
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    absl::StrAppend(&out, "<line x1=\"", fmt(kLeft + pw + 10), "\" y1=\"",
                    fmt(ly - 4), "\" x2=\"", fmt(kLeft + pw + 30), "\" y2=\"",
                    fmt(ly - 4), "\" stroke=\"", color,
                    "\" stroke-width=\"2\"/>\n<text x=\"", fmt(kLeft + pw + 34),
                    "\" y=\"", fmt(ly), "\">", Escape(series[s].name),
                    "</text>\n");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace privaudit
