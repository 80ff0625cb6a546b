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

#ifndef REFSMITH_ALIGNER_HPP_
#define REFSMITH_ALIGNER_HPP_

#include <cstddef>
#include <vector>

#include "refsmith/corpus.hpp"
#include "refsmith/translation_table.hpp"

namespace refsmith {

// Which E-step kernel to run. Both produce the same expected counts up to
// floating-point summation order; kSerial is the reference implementation.
enum class Execution { kSerial, kParallel };

struct EmConfig {
  std::size_t iterations = 5;
  // Prior mass of the NULL source word; 0 disables NULL entirely.
  double null_weight = 0.05;
  // Entries below this are pruned after the last iteration. Also the floor
  // probability for pairs the table has never seen.
  double min_prob = 1e-6;
  Execution execution = Execution::kParallel;
  // OpenMP thread count for the parallel kernel; 0 uses the runtime default.
  int workers = 0;
};

// Settings for the diagonal distortion of the reparameterized Model 2.
struct DiagonalConfig {
  double initial_tension = 4.0;
  bool optimize_tension = true;
  std::size_t tension_steps = 8;
  double tension_step_size = 1.0;
  double min_tension = 0.1;
  double max_tension = 14.0;
};

struct Model2Params {
  TranslationTable table;
  double tension = 4.0;
  double null_weight = 0.05;
};

// Per-iteration diagnostics. log_likelihood[i] is the corpus log-likelihood
// under the parameters entering iteration i; the last element is measured
// after the final M-step, so it has iterations + 1 entries.
struct TrainingTrace {
  std::vector<double> log_likelihood;
  std::vector<double> max_row_error;  // after each M-step
  std::vector<double> tension;        // after each iteration (Model 2 only)
  std::size_t target_tokens = 0;
};

// Throws UsageError for an empty corpus or an invalid config.
void CheckEmConfig(const EmConfig& config);

// IBM Model 1 trained by EM from a uniform table.
TranslationTable TrainModel1(const Corpus& corpus, const EmConfig& config,
                             TrainingTrace* trace = nullptr);

// Model 2 with the log-linear diagonal prior
//   p(s | t, m, n) ∝ exp(-tension * |s/m - t/n|)
// for source length m and target length n, plus a fixed NULL mass.
Model2Params TrainModel2Diag(const Corpus& corpus, const EmConfig& config,
                             const DiagonalConfig& diagonal = {},
                             TrainingTrace* trace = nullptr);

// -|s/m - t/n| for 1-indexed positions.
double DiagonalFeature(std::size_t s, std::size_t t, std::size_t m,
                       std::size_t n);

// Links each target position to argmax_s t(y_t | x_s); NULL (when enabled)
// competes as position 0 and produces no link. Ties go to the smallest s.
Alignment ViterbiAlign(const SentencePair& pair, const TranslationTable& table,
                       bool use_null);

// Viterbi alignment under the diagonal prior times the lexical table.
Alignment ViterbiAlign(const SentencePair& pair, const Model2Params& params);

std::vector<Alignment> AlignCorpus(const Corpus& corpus,
                                   const TranslationTable& table, bool use_null);
std::vector<Alignment> AlignCorpus(const Corpus& corpus,
                                   const Model2Params& params);

// Reads the "tension" and "null_weight" notes written by TrainModel2Diag.
Model2Params Model2FromTable(TranslationTable table);

}  // namespace refsmith

#endif  // REFSMITH_ALIGNER_HPP_
