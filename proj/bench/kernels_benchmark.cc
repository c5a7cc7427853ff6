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

// Serial reference vs OpenMP kernel. The argument is the OpenMP thread count
// for the parallel variants.

#include <omp.h>

#include <cstdlib>

#include "benchmark/benchmark.h"
#include "privaudit/bootstrap.h"
#include "privaudit/extraction.h"
#include "privaudit/lira.h"
#include "privaudit/rmia.h"
#include "privaudit/roc.h"
#include "privaudit/synthetic.h"

namespace privaudit {
namespace {

template <typename T>
T Unwrap(absl::StatusOr<T> v) {
  if (!v.ok()) std::abort();
  return *std::move(v);
}

const LogitPanel& Panel() {
  static const LogitPanel* panel =
      new LogitPanel(Unwrap(GenLogitPanel(20000, 16, 2.0, 0.0, 1.0, 1)));
  return *panel;
}

const ScoreRecordSet& Scores() {
  static const ScoreRecordSet* set =
      new ScoreRecordSet(Unwrap(GenShiftedGaussianScores({2000, 1.0, 1.0, 2})));
  return *set;
}

const std::vector<TokenTrace>& Traces() {
  static const auto* traces = new std::vector<TokenTrace>(
      Unwrap(GenToyLmTraces(16, 8, 20000, 3)).traces);
  return *traces;
}

void BM_LiraSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::RunLira(Panel(), LiraConfig()));
  }
}
void BM_LiraParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(RunLira(Panel(), LiraConfig()));
}

RmiaConfig Rmia() {
  RmiaConfig config;
  config.population_indices = Unwrap(SamplePopulation(20000, 2000, 4));
  return config;
}
void BM_RmiaSerial(benchmark::State& state) {
  const RmiaConfig config = Rmia();
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::RunRmia(Panel(), config));
  }
}
void BM_RmiaParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const RmiaConfig config = Rmia();
  for (auto _ : state) benchmark::DoNotOptimize(RunRmia(Panel(), config));
}

BootstrapConfig Bootstrap() {
  BootstrapConfig config;
  config.k = 200;
  return config;
}
void BM_BootstrapSerial(benchmark::State& state) {
  const auto grid = Unwrap(ThresholdGrid(Scores()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        serial::BootstrapRounds(Scores(), grid, Bootstrap()));
  }
}
void BM_BootstrapParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const auto grid = Unwrap(ThresholdGrid(Scores()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(BootstrapRounds(Scores(), grid, Bootstrap()));
  }
}

void BM_PzSerial(benchmark::State& state) {
  const auto scheme = SamplingScheme::TopP(0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::ComputePzBatch(Traces(), scheme));
  }
}
void BM_PzParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const auto scheme = SamplingScheme::TopP(0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputePzBatch(Traces(), scheme));
  }
}

BENCHMARK(BM_LiraSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LiraParallel)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RmiaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RmiaParallel)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PzSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PzParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace privaudit

BENCHMARK_MAIN();
