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

#include "refsmith/decoder.hpp"

#include <algorithm>
#include <string>

#include "refsmith/error.hpp"

namespace refsmith {

namespace {

std::size_t Limit(const Sentence& source, const DecodeOptions& options) {
  if (source.empty()) throw UsageError("cannot decode an empty source sentence");
  if (options.schedule.k < 1) throw UsageError("wait-k needs k >= 1");
  if (options.beam_size < 1) throw UsageError("beam size must be at least 1");
  return options.max_length ? options.max_length : DefaultMaxLength(source.size());
}

ModelResponse Ask(TranslationModel& model, const Sentence& source,
                  const Sentence& target, std::size_t t,
                  const WaitKSchedule& schedule, std::size_t n_best) {
  const std::size_t observed = schedule.Observed(t, source.size());
  ModelQuery query{std::span<const Token>(source.data(), observed),
                   std::span<const Token>(target), n_best};
  try {
    ModelResponse response = model.Query(query);
    ValidateResponse(response);
    if (response.candidates.size() > n_best) response.candidates.resize(n_best);
    return response;
  } catch (const ProtocolError& e) {
    throw DecodeError(std::string("step ") + std::to_string(t) + ": " + e.what(),
                      t, true, e.raw());
  }
}

[[noreturn]] void NothingAtFirstStep() {
  throw DecodeError("step 1: model offered only END, output would be empty", 1,
                    false);
}

struct Expansion {
  std::size_t parent;
  const Candidate* candidate;
  double score;
};

}  // namespace

std::size_t ScheduleG(std::size_t t, std::size_t k, std::size_t source_length) {
  if (k >= source_length || t - 1 >= source_length - k) return source_length;
  return t + k - 1;
}

std::size_t WaitKSchedule::Observed(std::size_t t, std::size_t source_length) const {
  return ScheduleG(t, k, source_length);
}

std::size_t DefaultMaxLength(std::size_t source_length) {
  return 2 * source_length + 10;
}

double Hypothesis::NormalizedScore() const {
  const std::size_t steps = step_logprobs.size();
  return steps == 0 ? 0.0 : score / static_cast<double>(steps);
}

Hypothesis GreedyDecode(const Sentence& source, TranslationModel& model,
                        const DecodeOptions& options) {
  const std::size_t max_length = Limit(source, options);
  Hypothesis hyp;
  for (std::size_t t = 1; t <= max_length; ++t) {
    const ModelResponse response =
        Ask(model, source, hyp.tokens, t, options.schedule, 2);
    const auto pick = std::find_if(
        response.candidates.begin(), response.candidates.end(),
        [t](const Candidate& c) { return !(c.end && t == 1); });
    if (pick == response.candidates.end()) NothingAtFirstStep();
    hyp.score += pick->logprob;
    hyp.step_logprobs.push_back(pick->logprob);
    if (pick->end) {
      hyp.finished = true;
      break;
    }
    hyp.tokens.push_back(pick->token);
  }
  return hyp;
}

Hypothesis BeamDecode(const Sentence& source, TranslationModel& model,
                      const DecodeOptions& options) {
  const std::size_t max_length = Limit(source, options);
  const std::size_t beam_size = options.beam_size;
  std::vector<Hypothesis> active(1);
  std::vector<Hypothesis> finished;
  std::vector<ModelResponse> responses;
  std::vector<Expansion> expansions;

  for (std::size_t t = 1; t <= max_length && !active.empty(); ++t) {
    responses.clear();
    expansions.clear();
    for (const Hypothesis& hyp : active) {
      responses.push_back(
          Ask(model, source, hyp.tokens, t, options.schedule, beam_size + 1));
    }
    for (std::size_t p = 0; p < active.size(); ++p) {
      for (const Candidate& c : responses[p].candidates) {
        if (c.end && t == 1) continue;
        expansions.push_back({p, &c, active[p].score + c.logprob});
      }
    }
    if (expansions.empty()) NothingAtFirstStep();
    std::stable_sort(expansions.begin(), expansions.end(),
                     [](const Expansion& a, const Expansion& b) {
                       return a.score > b.score;
                     });
    if (expansions.size() > beam_size) expansions.resize(beam_size);

    std::vector<Hypothesis> next;
    for (const Expansion& e : expansions) {
      Hypothesis child = active[e.parent];
      child.score = e.score;
      child.step_logprobs.push_back(e.candidate->logprob);
      if (e.candidate->end) {
        child.finished = true;
        finished.push_back(std::move(child));
      } else {
        child.tokens.push_back(e.candidate->token);
        next.push_back(std::move(child));
      }
    }
    active = std::move(next);
  }

  // Finished hypotheses in completion order, then whatever hit max_length.
  finished.insert(finished.end(), std::make_move_iterator(active.begin()),
                  std::make_move_iterator(active.end()));
  std::size_t best = 0;
  for (std::size_t i = 1; i < finished.size(); ++i) {
    if (finished[i].NormalizedScore() > finished[best].NormalizedScore()) best = i;
  }
  return std::move(finished[best]);
}

Hypothesis WaitKDecode(const Sentence& source, TranslationModel& model,
                       const DecodeOptions& options) {
  if (options.beam_size == 1) return GreedyDecode(source, model, options);
  return BeamDecode(source, model, options);
}

}  // namespace refsmith
