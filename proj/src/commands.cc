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

#include "privaudit/commands.h"

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "privaudit/bootstrap.h"
#include "privaudit/extraction.h"
#include "privaudit/guess_audit.h"
#include "privaudit/lira.h"
#include "privaudit/observation.h"
#include "privaudit/report.h"
#include "privaudit/rmia.h"
#include "privaudit/roc.h"
#include "privaudit/synthetic.h"

namespace privaudit {
namespace {

using nlohmann::json;

struct OutputFlags {
  std::string report = "-";
  std::string format = "json";
};

absl::StatusOr<uint64_t> ResolveSeed(const std::optional<uint64_t>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return uint64_t{0};
  uint64_t seed = 0;
  if (!absl::SimpleAtoi(env, &seed)) {
    return absl::InvalidArgumentError(
        absl::StrCat(kSeedEnv, "='", env, "' is not an unsigned integer"));
  }
  return seed;
}

absl::Status WriteOutput(const std::string& path, const std::string& data) {
  if (path == "-") {
    std::cout << data;
    std::cout.flush();
    return absl::OkStatus();
  }
  return WriteFile(path, data);
}

absl::Status Emit(const AuditReport& report, const OutputFlags& out) {
  auto format = ParseReportFormat(out.format);
  if (!format.ok()) return format.status();
  return WriteOutput(out.report, RenderReport(report, *format));
}

void AddOutputFlags(CLI::App* cmd, OutputFlags& out) {
  cmd->add_option("--report", out.report, "Report destination ('-' for stdout)")
      ->capture_default_str();
  cmd->add_option("--format", out.format, "Report format")
      ->check(CLI::IsMember({"json", "markdown"}))
      ->capture_default_str();
}

// ---------------------------------------------------------------- lira

struct LiraFlags {
  std::string panel, out, mode = "online", variance = "auto";
  double std_floor = kDefaultStdFloor;
  double clamp = kDefaultConfidenceClamp;
  OutputFlags output;
};

absl::Status CmdLira(const LiraFlags& f) {
  LiraConfig config;
  config.mode = f.mode == "online" ? LiraMode::kOnline : LiraMode::kOffline;
  if (f.variance == "per_sample")
    config.variance_mode = VarianceMode::kPerSample;
  if (f.variance == "global") config.variance_mode = VarianceMode::kGlobal;
  config.std_floor = f.std_floor;
  config.confidence_clamp = f.clamp;
  auto panel = LoadLogitPanel(f.panel);
  if (!panel.ok()) return panel.status();
  auto scores = RunLira(*panel, config);
  if (!scores.ok()) return scores.status();
  if (absl::Status s = WriteFile(
          f.out, SerializeScoreRecords(*scores, ScoreFormatFromPath(f.out)));
      !s.ok()) {
    return s;
  }
  AuditReport report;
  report.command = "lira";
  report.config = {{"panel", f.panel},         {"out", f.out},
                   {"mode", f.mode},           {"variance", f.variance},
                   {"std_floor", f.std_floor}, {"confidence_clamp", f.clamp}};
  report.analyses.push_back(ScoreSetAnalysis("lira", *scores));
  return Emit(report, f.output);
}

// ---------------------------------------------------------------- rmia

struct RmiaFlags {
  std::string panel, out, alpha = "0.3";
  double gamma = kDefaultRmiaGamma;
  double prob_floor = kDefaultProbFloor;
  size_t population_size = 0;
  std::optional<uint64_t> seed;
  OutputFlags output;
};

absl::Status CmdRmia(const RmiaFlags& f) {
  auto seed = ResolveSeed(f.seed);
  if (!seed.ok()) return seed.status();
  RmiaConfig config;
  config.gamma = f.gamma;
  config.prob_floor = f.prob_floor;
  if (f.alpha == "auto") {
    config.alpha.reset();
  } else {
    double alpha = 0.0;
    if (!absl::SimpleAtod(f.alpha, &alpha)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "--alpha must be a number or 'auto', got '", f.alpha, "'"));
    }
    config.alpha = alpha;
  }
  auto panel = LoadLogitPanel(f.panel);
  if (!panel.ok()) return panel.status();
  const size_t n = panel->n_samples();
  const size_t count =
      f.population_size > 0 ? f.population_size : std::max<size_t>(1, n / 4);
  auto population = SamplePopulation(n, count, *seed);
  if (!population.ok()) return population.status();
  config.population_indices = *population;
  auto scores = RunRmia(*panel, config);
  if (!scores.ok()) return scores.status();
  if (absl::Status s = WriteFile(
          f.out, SerializeScoreRecords(*scores, ScoreFormatFromPath(f.out)));
      !s.ok()) {
    return s;
  }
  AuditReport report;
  report.command = "rmia";
  report.config = {{"panel", f.panel},
                   {"out", f.out},
                   {"gamma", f.gamma},
                   {"alpha", f.alpha},
                   {"prob_floor", f.prob_floor},
                   {"population_size", count},
                   {"seed", *seed}};
  report.analyses.push_back(ScoreSetAnalysis("rmia", *scores));
  return Emit(report, f.output);
}

// ---------------------------------------------------------------- audit

struct AuditFlags {
  std::string scores, resampling = "with_replacement", roc_csv, svg;
  size_t k = 1000;
  double confidence = 0.95;
  double delta = 0.0;
  std::optional<double> tpr;
  std::optional<uint64_t> seed;
  OutputFlags output;
};

absl::Status CmdAudit(const AuditFlags& f) {
  auto seed = ResolveSeed(f.seed);
  if (!seed.ok()) return seed.status();
  auto set = LoadScoreRecords(f.scores, ScoreFormatFromPath(f.scores));
  if (!set.ok()) return set.status();
  if (absl::Status s = set->RequireBothClasses(); !s.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(f.scores, ": ", s.message()));
  }
  BootstrapConfig config;
  config.k = f.k;
  config.confidence = f.confidence;
  config.delta = f.delta;
  config.seed = *seed;
  config.resampling = f.resampling == "without_replacement"
                          ? Resampling::kWithoutReplacement
                          : Resampling::kWithReplacement;
  auto audit = RunBootstrapAudit(*set, config, f.tpr);
  if (!audit.ok()) return audit.status();

  auto curve = RocCurve(*set);
  if (!curve.ok()) return curve.status();
  if (!f.roc_csv.empty()) {
    if (absl::Status s = WriteFile(f.roc_csv, RocCsv(*curve)); !s.ok())
      return s;
  }
  if (!f.svg.empty()) {
    ChartSeries roc{"ROC", {}};
    for (const RatePoint& p : *curve) roc.points.emplace_back(p.fpr, p.tpr);
    if (absl::Status s =
            WriteFile(f.svg, SvgLineChart("ROC curve", "false positive rate",
                                          "true positive rate", {roc}));
        !s.ok()) {
      return s;
    }
  }

  AuditReport report;
  report.command = "audit";
  report.config = {
      {"scores", f.scores}, {"k", f.k},      {"confidence", f.confidence},
      {"delta", f.delta},   {"seed", *seed}, {"resampling", f.resampling}};
  if (f.tpr) report.config["epsilon_at_tpr"] = *f.tpr;
  report.analyses.push_back(MetricsAnalysis(*set, f.delta, f.tpr));
  report.analyses.push_back(BootstrapAnalysis(*audit));
  return Emit(report, f.output);
}

// ---------------------------------------------------------------- guess

struct GuessFlags {
  std::string scores, strategy = "both", bound = "binomial", sweep_csv, svg;
  double delta = 0.0;
  double significance = 0.05;
  size_t grid_min = 10;
  size_t grid_points = 20;
  bool no_bonferroni = false;
  OutputFlags output;
};

absl::Status CmdGuessAudit(const GuessFlags& f) {
  auto set = LoadScoreRecords(f.scores, ScoreFormatFromPath(f.scores));
  if (!set.ok()) return set.status();
  GuessAuditConfig config;
  config.delta = f.delta;
  config.significance = f.significance;
  config.grid_min = f.grid_min;
  config.grid_points = f.grid_points;
  config.bonferroni = !f.no_bonferroni;
  config.bound =
      f.bound == "binomial" ? BoundKind::kBinomial : BoundKind::kFdpPlugin;
  if (f.strategy != "both") {
    auto strategy = ParseGuessStrategy(f.strategy);
    if (!strategy.ok()) return strategy.status();
    config.strategies = {*strategy};
  }
  auto sweep = Sweep(*set, config);
  if (!sweep.ok()) return sweep.status();
  if (!f.sweep_csv.empty()) {
    if (absl::Status s = WriteFile(f.sweep_csv, SweepCsv(*sweep)); !s.ok()) {
      return s;
    }
  }
  if (!f.svg.empty()) {
    std::vector<ChartSeries> series;
    for (GuessStrategy strategy :
         {GuessStrategy::kOneSided, GuessStrategy::kTwoSided}) {
      ChartSeries s{GuessStrategyName(strategy), {}};
      for (const SweepRow& row : sweep->table) {
        if (row.summary.strategy == strategy) {
          s.points.emplace_back(static_cast<double>(row.summary.c_hat),
                                row.epsilon);
        }
      }
      if (!s.points.empty()) series.push_back(std::move(s));
    }
    if (absl::Status s = WriteFile(
            f.svg, SvgLineChart("Guess audit sweep", "guesses (c_hat)",
                                "epsilon lower bound", series, true));
        !s.ok()) {
      return s;
    }
  }
  AuditReport report;
  report.command = "guess-audit";
  report.config = {{"scores", f.scores},
                   {"strategy", f.strategy},
                   {"bound", f.bound},
                   {"delta", f.delta},
                   {"significance", f.significance},
                   {"grid_min", f.grid_min},
                   {"grid_points", f.grid_points},
                   {"bonferroni", !f.no_bonferroni}};
  report.analyses.push_back(GuessAnalysis(*sweep, config, set->size()));
  return Emit(report, f.output);
}

// ---------------------------------------------------------------- extract

struct ExtractFlags {
  std::string traces, completions, np_csv, svg;
  std::vector<std::string> schemes = {"greedy"};
  std::vector<std::string> predicates = {"exact", "inclusion"};
  double tau = 0.8;
  std::vector<double> pz_thresholds = {0.5, 0.01};
  std::vector<uint64_t> n_grid = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  std::vector<double> p_targets = {0.1, 0.5, 0.9};
  OutputFlags output;
};

absl::Status CmdExtract(const ExtractFlags& f) {
  std::vector<SamplingScheme> schemes;
  for (const std::string& s : f.schemes) {
    auto scheme = SamplingScheme::Parse(s);
    if (!scheme.ok()) return scheme.status();
    schemes.push_back(*scheme);
  }
  std::vector<MatchPredicate> predicates;
  for (const std::string& p : f.predicates) {
    auto predicate =
        MatchPredicate::Parse(p == "lcs" ? "lcs:" + FormatDouble(f.tau) : p);
    if (!predicate.ok()) return predicate.status();
    predicates.push_back(*predicate);
  }
  std::vector<TokenTrace> traces;
  if (!f.traces.empty()) {
    auto loaded = LoadTokenTraces(f.traces);
    if (!loaded.ok()) return loaded.status();
    traces = std::move(*loaded);
  }
  std::vector<CompletionRecord> completions;
  if (!f.completions.empty()) {
    auto loaded = LoadCompletions(f.completions);
    if (!loaded.ok()) return loaded.status();
    completions = std::move(*loaded);
  }
  if (traces.empty() && completions.empty()) {
    return absl::InvalidArgumentError(
        "extract needs --traces and/or --completions with at least one entry");
  }
  auto table = ExtractionRates(traces, completions, schemes, predicates,
                               f.pz_thresholds);
  if (!table.ok()) return table.status();

  std::vector<NpPoint> curve;
  if (!traces.empty()) {
    auto pz = ComputePzBatch(traces, schemes.front());
    if (!pz.ok()) return pz.status();
    std::vector<double> values;
    for (const PzResult& r : *pz) values.push_back(r.pz);
    auto np = NpCurve(values, f.n_grid, f.p_targets);
    if (!np.ok()) return np.status();
    curve = std::move(*np);
    if (!f.np_csv.empty()) {
      if (absl::Status s = WriteFile(f.np_csv, NpCurveCsv(curve)); !s.ok()) {
        return s;
      }
    }
    if (!f.svg.empty()) {
      std::vector<ChartSeries> series;
      for (double p : f.p_targets) {
        ChartSeries s{"p=" + FormatDouble(p), {}};
        for (const NpPoint& point : curve) {
          if (point.p == p) {
            s.points.emplace_back(static_cast<double>(point.n), point.fraction);
          }
        }
        series.push_back(std::move(s));
      }
      if (absl::Status s = WriteFile(
              f.svg, SvgLineChart("(n, p)-discoverable extraction", "n",
                                  "fraction extractable", series, true));
          !s.ok()) {
        return s;
      }
    }
  }
  AuditReport report;
  report.command = "extract";
  report.config = {{"traces", f.traces},   {"completions", f.completions},
                   {"schemes", f.schemes}, {"predicates", f.predicates},
                   {"tau", f.tau},         {"pz_thresholds", f.pz_thresholds},
                   {"n_grid", f.n_grid},   {"p_targets", f.p_targets}};
  report.analyses.push_back(
      ExtractionAnalysis(*table, curve, f.n_grid, f.p_targets));
  return Emit(report, f.output);
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
  std::string out, table_out, completions_out, scheme = "temperature:1";
  std::optional<uint64_t> seed;
  // gaussian-pair
  size_t m_per_class = 1000;
  double shift = 2.0, sigma = 1.0;
  // rr / gaussian-mech
  size_t m = 10000;
  double epsilon0 = 1.0, sigma_noise = 1.0, delta = 1e-5;
  // panel
  size_t samples = 1000, models = 8;
  double mu_in = 2.0, mu_out = 0.0;
  // toy-lm
  size_t vocab = 3, length = 3, traces = 10, per_trace = 1;
  OutputFlags output;
};

absl::Status FinishSynth(const std::string& generator, json config,
                         const Metadata& metadata, const SynthFlags& f) {
  AuditReport report;
  report.command = "synth " + generator;
  report.config = std::move(config);
  Analysis a;
  a.name = "synth";
  a.config = report.config;
  for (const auto& [k, v] : metadata) a.results[k] = v;
  report.analyses.push_back(std::move(a));
  return Emit(report, f.output);
}

absl::Status WriteScores(const ScoreRecordSet& set, const std::string& out) {
  return WriteFile(out, SerializeScoreRecords(set, ScoreFormatFromPath(out)));
}

absl::Status CmdSynthGaussianPair(const SynthFlags& f) {
  auto seed = ResolveSeed(f.seed);
  if (!seed.ok()) return seed.status();
  auto set = GenShiftedGaussianScores({f.m_per_class, f.shift, f.sigma, *seed});
  if (!set.ok()) return set.status();
  if (absl::Status s = WriteScores(*set, f.out); !s.ok()) return s;
  return FinishSynth("gaussian-pair",
                     {{"m_per_class", f.m_per_class},
                      {"shift", f.shift},
                      {"sigma", f.sigma},
                      {"seed", *seed},
                      {"out", f.out}},
                     set->metadata(), f);
}

absl::Status CmdSynthRr(const SynthFlags& f) {
  auto seed = ResolveSeed(f.seed);
  if (!seed.ok()) return seed.status();
  auto set = GenRandomizedResponseGuesses(f.m, f.epsilon0, *seed);
  if (!set.ok()) return set.status();
  if (absl::Status s = WriteScores(*set, f.out); !s.ok()) return s;
  return FinishSynth(
      "rr",
      {{"m", f.m}, {"epsilon0", f.epsilon0}, {"seed", *seed}, {"out", f.out}},
      set->metadata(), f);
}

absl::Status CmdSynthGaussianMech(const SynthFlags& f) {
  auto seed = ResolveSeed(f.seed);
  if (!seed.ok()) return seed.status();
  auto set = GenGaussianMechanismScores(f.m, f.sigma_noise, f.delta, *seed);
  if (!set.ok()) return set.status();
  if (absl::Status s = WriteScores(*set, f.out); !s.ok()) return s;
  return FinishSynth("gaussian-mech",
                     {{"m", f.m},
                      {"sigma_noise", f.sigma_noise},
                      {"delta", f.delta},
                      {"seed", *seed},
                      {"out", f.out}},
                     set->metadata(), f);
}

absl::Status CmdSynthPanel(const SynthFlags& f) {
  auto seed = ResolveSeed(f.seed);
  if (!seed.ok()) return seed.status();
  auto panel =
      GenLogitPanel(f.samples, f.models, f.mu_in, f.mu_out, f.sigma, *seed);
  if (!panel.ok()) return panel.status();
  if (absl::Status s = WriteFile(f.out, SerializeLogitPanel(*panel)); !s.ok()) {
    return s;
  }
  return FinishSynth("panel",
                     {{"samples", f.samples},
                      {"models", f.models},
                      {"mu_in", f.mu_in},
                      {"mu_out", f.mu_out},
                      {"sigma", f.sigma},
                      {"seed", *seed},
                      {"out", f.out}},
                     panel->metadata(), f);
}

absl::Status CmdSynthToyLm(const SynthFlags& f) {
  auto seed = ResolveSeed(f.seed);
  if (!seed.ok()) return seed.status();
  auto corpus = GenToyLmTraces(f.vocab, f.length, f.traces, *seed);
  if (!corpus.ok()) return corpus.status();
  if (absl::Status s = WriteFile(f.out, SerializeTokenTraces(corpus->traces));
      !s.ok()) {
    return s;
  }
  if (!f.table_out.empty()) {
    if (absl::Status s = WriteFile(f.table_out, SerializeToyLm(corpus->lm));
        !s.ok()) {
      return s;
    }
  }
  json config = {{"vocab", f.vocab},
                 {"length", f.length},
                 {"traces", f.traces},
                 {"seed", *seed},
                 {"out", f.out}};
  if (!f.completions_out.empty()) {
    auto scheme = SamplingScheme::Parse(f.scheme);
    if (!scheme.ok()) return scheme.status();
    if (absl::Status s = WriteFile(f.completions_out,
                                   SerializeCompletions(SampleCompletions(
                                       *corpus, *scheme, f.per_trace, *seed)));
        !s.ok()) {
      return s;
    }
    config["completions_out"] = f.completions_out;
    config["scheme"] = scheme->Label();
    config["per_trace"] = f.per_trace;
  }
  return FinishSynth("toy-lm", config,
                     {{"generator", "toy_lm"},
                      {"vocab_size", absl::StrCat(f.vocab)},
                      {"length", absl::StrCat(f.length)}},
                     f);
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kPermissionDenied:
      return kExitValidation;
    default:
      return kExitAnalysis;
  }
}

int RunCli(const std::vector<std::string>& args) {
  CLI::App app{"Empirical differential-privacy audit engine", "privaudit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::function<absl::Status()> action;
  auto bind = [&action](CLI::App* cmd, std::function<absl::Status()> fn) {
    cmd->callback([&action, fn] { action = fn; });
  };

  LiraFlags lira;
  CLI::App* lira_cmd =
      app.add_subcommand("lira", "Score a logit panel with LiRA");
  lira_cmd->add_option("--panel", lira.panel, "Logit panel JSON")->required();
  lira_cmd->add_option("--out", lira.out, "Score records (.jsonl or .csv)")
      ->required();
  lira_cmd->add_option("--mode", lira.mode)
      ->check(CLI::IsMember({"online", "offline"}))
      ->capture_default_str();
  lira_cmd->add_option("--variance", lira.variance)
      ->check(CLI::IsMember({"auto", "per_sample", "global"}))
      ->capture_default_str();
  lira_cmd->add_option("--std-floor", lira.std_floor)->capture_default_str();
  lira_cmd->add_option("--confidence-clamp", lira.clamp)->capture_default_str();
  AddOutputFlags(lira_cmd, lira.output);
  bind(lira_cmd, [&] { return CmdLira(lira); });

  RmiaFlags rmia;
  CLI::App* rmia_cmd =
      app.add_subcommand("rmia", "Score a logit panel with RMIA");
  rmia_cmd->add_option("--panel", rmia.panel, "Logit panel JSON")->required();
  rmia_cmd->add_option("--out", rmia.out, "Score records (.jsonl or .csv)")
      ->required();
  rmia_cmd->add_option("--gamma", rmia.gamma)->capture_default_str();
  rmia_cmd->add_option("--alpha", rmia.alpha, "Number in [0, 1] or 'auto'")
      ->capture_default_str();
  rmia_cmd->add_option("--prob-floor", rmia.prob_floor)->capture_default_str();
  rmia_cmd->add_option("--population-size", rmia.population_size,
                       "Reference rows (default: a quarter of the panel)");
  rmia_cmd->add_option("--seed", rmia.seed);
  AddOutputFlags(rmia_cmd, rmia.output);
  bind(rmia_cmd, [&] { return CmdRmia(rmia); });

  AuditFlags audit;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Metrics and bootstrap intervals for scores");
  audit_cmd->add_option("--scores", audit.scores, "Score records")->required();
  audit_cmd->add_option("--k", audit.k, "Bootstrap rounds")
      ->capture_default_str();
  audit_cmd->add_option("--confidence", audit.confidence)
      ->capture_default_str();
  audit_cmd->add_option("--delta", audit.delta)->capture_default_str();
  audit_cmd->add_option("--seed", audit.seed);
  audit_cmd->add_option("--resampling", audit.resampling)
      ->check(CLI::IsMember({"with_replacement", "without_replacement"}))
      ->capture_default_str();
  audit_cmd->add_option("--epsilon-at-tpr", audit.tpr);
  audit_cmd->add_option("--roc-csv", audit.roc_csv);
  audit_cmd->add_option("--svg", audit.svg, "ROC chart");
  AddOutputFlags(audit_cmd, audit.output);
  bind(audit_cmd, [&] { return CmdAudit(audit); });

  GuessFlags guess;
  CLI::App* guess_cmd =
      app.add_subcommand("guess-audit", "Guess-count epsilon lower bound");
  guess_cmd->add_option("--scores", guess.scores, "Score records")->required();
  guess_cmd->add_option("--strategy", guess.strategy)
      ->check(CLI::IsMember(
          {"both", "one-sided", "two-sided", "one_sided", "two_sided"}))
      ->capture_default_str();
  guess_cmd->add_option("--bound", guess.bound)
      ->check(CLI::IsMember({"binomial", "fdp_plugin"}))
      ->capture_default_str();
  guess_cmd->add_option("--delta", guess.delta)->capture_default_str();
  guess_cmd->add_option("--significance", guess.significance)
      ->capture_default_str();
  guess_cmd->add_option("--grid-min", guess.grid_min)->capture_default_str();
  guess_cmd->add_option("--grid-points", guess.grid_points)
      ->capture_default_str();
  guess_cmd->add_flag("--no-bonferroni", guess.no_bonferroni,
                      "Use the full significance at every grid point");
  guess_cmd->add_option("--sweep-csv", guess.sweep_csv);
  guess_cmd->add_option("--svg", guess.svg, "Sweep chart");
  AddOutputFlags(guess_cmd, guess.output);
  bind(guess_cmd, [&] { return CmdGuessAudit(guess); });

  ExtractFlags extract;
  CLI::App* extract_cmd =
      app.add_subcommand("extract", "Extraction rates and (n, p) curves");
  extract_cmd->add_option("--traces", extract.traces, "Token traces JSONL");
  extract_cmd->add_option("--completions", extract.completions,
                          "Completion records JSONL");
  extract_cmd
      ->add_option("--scheme", extract.schemes,
                   "greedy | temperature:T | top_k:K | top_p:P (repeatable)")
      ->capture_default_str();
  extract_cmd
      ->add_option("--predicate", extract.predicates,
                   "exact | inclusion | lcs | lcs:TAU (repeatable)")
      ->capture_default_str();
  extract_cmd->add_option("--tau", extract.tau, "Threshold for bare 'lcs'")
      ->capture_default_str();
  extract_cmd->add_option("--pz-threshold", extract.pz_thresholds)
      ->capture_default_str();
  extract_cmd->add_option("--n-grid", extract.n_grid)->capture_default_str();
  extract_cmd->add_option("--p-target", extract.p_targets)
      ->capture_default_str();
  extract_cmd->add_option("--np-csv", extract.np_csv);
  extract_cmd->add_option("--svg", extract.svg, "(n, p) chart");
  AddOutputFlags(extract_cmd, extract.output);
  bind(extract_cmd, [&] { return CmdExtract(extract); });

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Synthetic fixtures");
  synth_cmd->require_subcommand(1);
  auto synth_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", synth.out, "Output file")->required();
    cmd->add_option("--seed", synth.seed);
    AddOutputFlags(cmd, synth.output);
  };
  CLI::App* gp = synth_cmd->add_subcommand("gaussian-pair",
                                           "Shifted Gaussian member scores");
  synth_common(gp);
  gp->add_option("--m-per-class", synth.m_per_class)->capture_default_str();
  gp->add_option("--shift", synth.shift)->capture_default_str();
  gp->add_option("--sigma", synth.sigma)->capture_default_str();
  bind(gp, [&] { return CmdSynthGaussianPair(synth); });

  CLI::App* rr = synth_cmd->add_subcommand("rr", "Randomized-response guesses");
  synth_common(rr);
  rr->add_option("--m", synth.m)->capture_default_str();
  rr->add_option("--epsilon0", synth.epsilon0)->capture_default_str();
  bind(rr, [&] { return CmdSynthRr(synth); });

  CLI::App* gm =
      synth_cmd->add_subcommand("gaussian-mech", "Gaussian mechanism scores");
  synth_common(gm);
  gm->add_option("--m", synth.m)->capture_default_str();
  gm->add_option("--sigma-noise", synth.sigma_noise)->capture_default_str();
  gm->add_option("--delta", synth.delta)->capture_default_str();
  bind(gm, [&] { return CmdSynthGaussianMech(synth); });

  CLI::App* panel = synth_cmd->add_subcommand("panel", "Logit panel");
  synth_common(panel);
  panel->add_option("--samples", synth.samples)->capture_default_str();
  panel->add_option("--models", synth.models)->capture_default_str();
  panel->add_option("--mu-in", synth.mu_in)->capture_default_str();
  panel->add_option("--mu-out", synth.mu_out)->capture_default_str();
  panel->add_option("--sigma", synth.sigma)->capture_default_str();
  bind(panel, [&] { return CmdSynthPanel(synth); });

  CLI::App* toy = synth_cmd->add_subcommand("toy-lm", "Toy bigram LM traces");
  synth_common(toy);
  toy->add_option("--vocab", synth.vocab)->capture_default_str();
  toy->add_option("--length", synth.length)->capture_default_str();
  toy->add_option("--traces", synth.traces)->capture_default_str();
  toy->add_option("--table-out", synth.table_out, "Bigram table JSON");
  toy->add_option("--completions-out", synth.completions_out,
                  "Sampled completions JSONL");
  toy->add_option("--scheme", synth.scheme, "Scheme for sampled completions")
      ->capture_default_str();
  toy->add_option("--per-trace", synth.per_trace)->capture_default_str();
  bind(toy, [&] { return CmdSynthToyLm(synth); });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  if (!action) return kExitValidation;
  const absl::Status status = action();
  if (!status.ok()) {
    std::cerr << "privaudit: " << status.message() << "\n";
  }
  return ExitCodeFor(status);
}

}  // namespace privaudit
