// Copyright 2026 The refsmith Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <memory>

#include "refsmith/aligner.hpp"
#include "refsmith/model.hpp"
#include "refsmith/pipeline.hpp"
#include "support/synthetic.hpp"

namespace {

using refsmith::Execution;

const refsmith::Corpus& BenchCorpus() {
  static const refsmith::Corpus corpus =
      refsmith::testing::MonotoneLexiconCorpus(5000, 400, 4, 20, 11, true);
  return corpus;
}

void BM_Model1(benchmark::State& state, Execution execution) {
  refsmith::EmConfig config;
  config.iterations = 3;
  config.execution = execution;
  for (auto _ : state) {
    benchmark::DoNotOptimize(refsmith::TrainModel1(BenchCorpus(), config));
  }
}
BENCHMARK_CAPTURE(BM_Model1, serial, Execution::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Model1, parallel, Execution::kParallel)->Unit(benchmark::kMillisecond);

void BM_Model2(benchmark::State& state, Execution execution) {
  refsmith::EmConfig config;
  config.iterations = 3;
  config.execution = execution;
  for (auto _ : state) {
    benchmark::DoNotOptimize(refsmith::TrainModel2Diag(BenchCorpus(), config));
  }
}
BENCHMARK_CAPTURE(BM_Model2, serial, Execution::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Model2, parallel, Execution::kParallel)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state, Execution execution) {
  const refsmith::TranslationTable table = refsmith::testing::IdentityTable(400, 0.2);
  refsmith::GenerationRun run;
  run.k = 3;
  run.beam_size = 4;
  run.execution = execution;
  const refsmith::ModelFactory factory = [&table] {
    return std::make_unique<refsmith::LexicalModel>(table);
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(refsmith::GeneratePseudoRefs(BenchCorpus(), run, factory));
  }
}
BENCHMARK_CAPTURE(BM_Generate, serial, Execution::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Generate, parallel, Execution::kParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
