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

#ifndef REFSMITH_DECODER_HPP_
#define REFSMITH_DECODER_HPP_

#include <cstddef>
#include <limits>
#include <vector>

#include "refsmith/corpus.hpp"
#include "refsmith/model.hpp"

namespace refsmith {

// Wait-k read schedule: before emitting y_t the decoder has read
// g(t) = min(t + k - 1, |x|) source words.
struct WaitKSchedule {
  std::size_t k = 1;

  // A schedule that sees the whole source from the first step.
  static WaitKSchedule FullSentence() {
    return {std::numeric_limits<std::size_t>::max()};
  }

  std::size_t Observed(std::size_t t, std::size_t source_length) const;
};

// g(t) for 1-indexed t; requires t, k, source_length >= 1.
std::size_t ScheduleG(std::size_t t, std::size_t k, std::size_t source_length);

// 2 * |x| + 10.
std::size_t DefaultMaxLength(std::size_t source_length);

struct Hypothesis {
  Sentence tokens;
  double score = 0.0;  // sum of step_logprobs
  std::vector<double> step_logprobs;  // includes the END step when finished
  bool finished = false;

  // score / number of steps taken (END counts as a step).
  double NormalizedScore() const;
};

struct DecodeOptions {
  WaitKSchedule schedule;
  std::size_t beam_size = 5;
  std::size_t max_length = 0;  // 0 means DefaultMaxLength(|x|)
};

// Picks the top candidate at each step, stopping at END or max_length. END is
// not allowed at step 1; DecodeError when nothing else is offered there.
Hypothesis GreedyDecode(const Sentence& source, TranslationModel& model,
                        const DecodeOptions& options);

// Length-synchronized beam search: every hypothesis of length t-1 is extended
// under the same prefix x_1..x_g(t). Hypotheses ending in END leave the beam
// and are kept; the result is the best of finished and surviving hypotheses
// by NormalizedScore(). With beam_size 1 this is exactly GreedyDecode.
Hypothesis BeamDecode(const Sentence& source, TranslationModel& model,
                      const DecodeOptions& options);

// Dispatches to GreedyDecode when beam_size is 1.
Hypothesis WaitKDecode(const Sentence& source, TranslationModel& model,
                       const DecodeOptions& options);

}  // namespace refsmith

#endif  // REFSMITH_DECODER_HPP_
