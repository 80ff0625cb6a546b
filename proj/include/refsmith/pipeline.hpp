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

#ifndef REFSMITH_PIPELINE_HPP_
#define REFSMITH_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "refsmith/aligner.hpp"
#include "refsmith/corpus.hpp"
#include "refsmith/model.hpp"

namespace refsmith {

struct GenerationRun {
  std::size_t k = 1;
  std::size_t beam_size = 5;
  std::size_t max_length = 0;  // 0 means 2 * |x| + 10 per sentence
  int workers = 0;             // 0 uses the OpenMP default
  Execution execution = Execution::kParallel;
};

struct GenerationFailure {
  std::size_t pair_id = 0;
  std::size_t step = 0;
  bool protocol = false;
  std::string message;
  std::string raw;
};

struct GenerationResult {
  std::vector<ScoredSentence> scored;       // ordered by pair_id
  std::vector<GenerationFailure> failures;  // ordered by pair_id
  std::string model_identity;
  std::size_t pairs = 0;

  bool has_protocol_failure() const;
};

// Decodes every source under the wait-k schedule and scores the output with
// sentence BLEU against the original target. Each worker owns one model from
// the factory; every model is created and checked for reachability before
// any decoding starts, and a failure there is raised for the whole run.
// Per-sentence failures land in GenerationResult::failures.
GenerationResult GeneratePseudoRefs(const Corpus& corpus, const GenerationRun& run,
                                    const ModelFactory& factory);

// Single-model sequential reference for GeneratePseudoRefs.
GenerationResult GeneratePseudoRefsSerial(const Corpus& corpus,
                                          const GenerationRun& run,
                                          TranslationModel& model);

// Flat "key=value" manifest: config echo, model identity, counts and one
// entry per failed pair. extra is appended verbatim.
void WriteManifest(const GenerationRun& run, const GenerationResult& result,
                   const std::vector<std::pair<std::string, std::string>>& extra,
                   const std::filesystem::path& path);

struct FilterPolicy {
  enum class Mode { kTopFraction, kMinBleu };
  Mode mode = Mode::kTopFraction;
  double top_fraction = 0.4;  // in (0, 1]
  double min_bleu = 0.0;      // in [0, 100]
};

// ceil(q * N) with a small tolerance so that e.g. 0.4 * 5 selects exactly 2.
std::size_t TopFractionCount(double fraction, std::size_t n);

// Top-fraction mode keeps the highest-BLEU items, breaking ties at the cut by
// smaller pair_id; min-BLEU mode keeps every item with bleu >= threshold.
// The selection is returned in pair_id order (stable for equal ids).
std::vector<ScoredSentence> FilterTop(const std::vector<ScoredSentence>& scored,
                                      const FilterPolicy& policy);

// All original pairs unchanged, then (source, pseudo_target) for every
// selected item with ids continuing after the last original. Pseudo targets identical to the original are kept.
Corpus AugmentCorpus(const Corpus& original,
                     const std::vector<ScoredSentence>& selected);

}  // namespace refsmith

#endif  // REFSMITH_PIPELINE_HPP_
