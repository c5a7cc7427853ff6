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

#include <stdlib.h>

#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "privaudit/commands.h"
#include "privaudit/observation.h"
#include "privaudit/synthetic.h"
#include "test_util.h"

namespace privaudit {
namespace {

using ::testing::HasSubstr;
using testing::TempPath;

std::string Slurp(const std::string& path) {
  auto text = ReadFile(path);
  EXPECT_TRUE(text.ok()) << text.status();
  return text.ok() ? *text : "";
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv(kSeedEnv); }
  void TearDown() override { unsetenv(kSeedEnv); }

  std::string Scores() {
    const std::string path = TempPath("scores.jsonl");
    EXPECT_EQ(RunCli({"synth", "gaussian-pair", "--out", path, "--m-per-class",
                      "150", "--shift", "2", "--seed", "4", "--report",
                      TempPath("synth.json")}),
              kExitOk);
    return path;
  }

  std::string Panel() {
    const std::string path = TempPath("panel.json");
    EXPECT_EQ(
        RunCli({"synth", "panel", "--out", path, "--samples", "120", "--models",
                "6", "--seed", "2", "--report", TempPath("synth.json")}),
        kExitOk);
    return path;
  }
};

TEST_F(CliTest, HelpAndVersionSucceed) {
  EXPECT_EQ(RunCli({"--help"}), kExitOk);
  EXPECT_EQ(RunCli({"--version"}), kExitOk);
}

TEST_F(CliTest, BadFlagsAreValidationErrors) {
  EXPECT_EQ(RunCli({}), kExitValidation);
  EXPECT_EQ(RunCli({"frobnicate"}), kExitValidation);
  EXPECT_EQ(RunCli({"audit", "--scores", Scores(), "--k", "many"}),
            kExitValidation);
  EXPECT_EQ(RunCli({"audit"}), kExitValidation);
}

TEST_F(CliTest, MissingFileIsValidationError) {
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(RunCli({"audit", "--scores", "/nonexistent/x.jsonl"}),
            kExitValidation);
  EXPECT_THAT(::testing::internal::GetCapturedStderr(),
              HasSubstr("/nonexistent/x.jsonl"));
  EXPECT_EQ(RunCli({"lira", "--panel", "/nonexistent/p.json", "--out",
                    TempPath("o.jsonl")}),
            kExitValidation);
}

TEST_F(CliTest, OneClassScoresAreValidationError) {
  const std::string path = TempPath("one_class.jsonl");
  ASSERT_OK(WriteFile(path,
                      "{\"sample_id\":\"a\",\"score\":1,\"membership\":1}\n"
                      "{\"sample_id\":\"b\",\"score\":2,\"membership\":1}\n"));
  EXPECT_EQ(RunCli({"audit", "--scores", path, "--report", TempPath("r.json")}),
            kExitValidation);
}

TEST_F(CliTest, UnmetPreconditionIsAnalysisError) {
  auto panel = LogitPanel::Create(2, 3, 0, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6},
                                  {0, 1, 0, 1, 1, 0}, {0, 1});
  ASSERT_OK(panel);
  const std::string path = TempPath("panel.json");
  ASSERT_OK(WriteFile(path, SerializeLogitPanel(*panel)));
  EXPECT_EQ(RunCli({"lira", "--panel", path, "--out", TempPath("o.jsonl"),
                    "--mode", "offline", "--variance", "per_sample"}),
            kExitAnalysis);
}

TEST_F(CliTest, UnresolvableStepNamesTheTrace) {
  TokenTrace trace{"needle", {{3, 0.3, 2, {0.5, 0.3}}}, 0.8, std::nullopt};
  const std::string path = TempPath("traces.jsonl");
  ASSERT_OK(WriteFile(path, SerializeTokenTraces({trace})));
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(RunCli({"extract", "--traces", path, "--scheme", "top_p:0.95",
                    "--report", TempPath("r.json")}),
            kExitAnalysis);
  EXPECT_THAT(::testing::internal::GetCapturedStderr(), HasSubstr("needle"));
}

TEST_F(CliTest, EmptyGuessGridIsValidationError) {
  EXPECT_EQ(RunCli({"guess-audit", "--scores", Scores(), "--grid-min", "100000",
                    "--report", TempPath("r.json")}),
            kExitValidation);
}

TEST_F(CliTest, AuditReportIsJsonWithExpectedKeys) {
  const std::string report = TempPath("audit.json");
  ASSERT_EQ(RunCli({"audit", "--scores", Scores(), "--k", "50", "--seed", "1",
                    "--epsilon-at-tpr", "0.01", "--report", report, "--roc-csv",
                    TempPath("roc.csv"), "--svg", TempPath("roc.svg")}),
            kExitOk);
  const auto j = nlohmann::json::parse(Slurp(report));
  EXPECT_EQ(j["command"], "audit");
  EXPECT_EQ(j["tool"]["name"], "privaudit");
  EXPECT_EQ(j["config"]["seed"], 1);
  EXPECT_THAT(Slurp(TempPath("roc.csv")), HasSubstr("threshold,tpr,fpr"));
  EXPECT_THAT(Slurp(TempPath("roc.svg")), HasSubstr("<svg"));
}

TEST_F(CliTest, MarkdownFormat) {
  const std::string report = TempPath("audit.md");
  ASSERT_EQ(RunCli({"guess-audit", "--scores", Scores(), "--strategy",
                    "one-sided", "--format", "markdown", "--report", report}),
            kExitOk);
  const std::string md = Slurp(report);
  EXPECT_THAT(md, HasSubstr("## Configuration"));
  EXPECT_THAT(md, ::testing::Not(HasSubstr("two_sided")));
}

TEST_F(CliTest, SeedEnvironmentVariable) {
  const std::string a = TempPath("a.jsonl"), b = TempPath("b.jsonl"),
                    c = TempPath("c.jsonl");
  ASSERT_EQ(RunCli({"synth", "rr", "--out", a, "--m", "200", "--seed", "9",
                    "--report", TempPath("r.json")}),
            kExitOk);
  setenv(kSeedEnv, "9", 1);
  ASSERT_EQ(RunCli({"synth", "rr", "--out", b, "--m", "200", "--report",
                    TempPath("r.json")}),
            kExitOk);
  unsetenv(kSeedEnv);
  ASSERT_EQ(RunCli({"synth", "rr", "--out", c, "--m", "200", "--report",
                    TempPath("r.json")}),
            kExitOk);
  EXPECT_EQ(Slurp(a), Slurp(b));
  EXPECT_NE(Slurp(a), Slurp(c));

  setenv(kSeedEnv, "not-a-number", 1);
  EXPECT_EQ(RunCli({"synth", "rr", "--out", c, "--report", TempPath("r.json")}),
            kExitValidation);
}

TEST_F(CliTest, EveryCommandIsByteDeterministic) {
  const std::string scores = Scores();
  const std::string panel = Panel();
  const std::string traces = TempPath("toy.jsonl");
  const std::string completions = TempPath("toy_completions.jsonl");
  ASSERT_EQ(RunCli({"synth", "toy-lm", "--out", traces, "--completions-out",
                    completions, "--vocab", "3", "--length", "3", "--traces",
                    "20", "--scheme", "top_k:2", "--seed", "5", "--report",
                    TempPath("r.json")}),
            kExitOk);
  const std::vector<std::vector<std::string>> commands = {
      {"lira", "--panel", panel, "--out", "@OUT"},
      {"rmia", "--panel", panel, "--out", "@OUT", "--seed", "3"},
      {"rmia", "--panel", panel, "--out", "@OUT", "--alpha", "auto"},
      {"audit", "--scores", scores, "--k", "40", "--seed", "3"},
      {"guess-audit", "--scores", scores},
      {"extract", "--traces", traces, "--completions", completions, "--scheme",
       "greedy", "--scheme", "top_k:2", "--predicate", "lcs"},
      {"synth", "gaussian-mech", "--out", "@OUT", "--m", "300", "--seed", "1"},
  };
  for (const auto& command : commands) {
    std::vector<std::string> reports;
    for (int run = 0; run < 2; ++run) {
      std::vector<std::string> args;
      const std::string out = TempPath("out.jsonl");
      for (const std::string& a : command)
        args.push_back(a == "@OUT" ? out : a);
      const std::string report = TempPath("rep");
      args.insert(args.end(), {"--report", report});
      ASSERT_EQ(RunCli(args), kExitOk) << command[0];
      reports.push_back(Slurp(report));
      if (std::find(command.begin(), command.end(), "@OUT") != command.end()) {
        reports.back() += Slurp(out);
      }
    }
    EXPECT_EQ(reports[0], reports[1]) << command[0];
  }
}

}  // namespace
}  // namespace privaudit
