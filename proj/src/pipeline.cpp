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

#include "refsmith/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <unordered_map>

#include "refsmith/bleu.hpp"
#include "refsmith/decoder.hpp"
#include "refsmith/error.hpp"
#include "refsmith/text_format.hpp"

namespace refsmith {

namespace {

void CheckRun(const GenerationRun& run) {
  if (run.k < 1) throw UsageError("wait-k needs k >= 1");
  if (run.beam_size < 1) throw UsageError("beam size must be at least 1");
}

DecodeOptions OptionsFor(const GenerationRun& run) {
  DecodeOptions options;
  options.schedule.k = run.k;
  options.beam_size = run.beam_size;
  options.max_length = run.max_length;
  return options;
}

// Outcome of one pair: a scored sentence or a failure.
struct Slot {
  std::optional<ScoredSentence> scored;
  std::optional<GenerationFailure> failure;
};

Slot DecodeOne(const SentencePair& pair, const DecodeOptions& options,
               TranslationModel& model) {
  Slot slot;
  try {
    Hypothesis hyp = WaitKDecode(pair.source, model, options);
    if (hyp.tokens.empty()) {
      throw DecodeError("decoder produced an empty sentence", 1, false);
    }
    const double bleu =
        SentenceBleu(hyp.tokens, std::span<const Sentence>(&pair.target, 1));
    slot.scored = ScoredSentence{pair.id, std::move(hyp.tokens), bleu};
  } catch (const DecodeError& e) {
    slot.failure = GenerationFailure{pair.id, e.step(), e.protocol(), e.what(), e.raw()};
  } catch (const std::exception& e) {
    slot.failure = GenerationFailure{pair.id, 0, false, e.what(), {}};
  }
  return slot;
}

GenerationResult Gather(std::vector<Slot>& slots) {
  GenerationResult result;
  result.pairs = slots.size();
  for (Slot& slot : slots) {
    if (slot.scored) result.scored.push_back(std::move(*slot.scored));
    if (slot.failure) result.failures.push_back(std::move(*slot.failure));
  }
  return result;
}

std::string OneLine(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

bool GenerationResult::has_protocol_failure() const {
  return std::any_of(failures.begin(), failures.end(),
                     [](const GenerationFailure& f) { return f.protocol; });
}

GenerationResult GeneratePseudoRefsSerial(const Corpus& corpus,
                                          const GenerationRun& run,
                                          TranslationModel& model) {
  CheckRun(run);
  model.CheckReachable();
  const DecodeOptions options = OptionsFor(run);
  std::vector<Slot> slots;
  slots.reserve(corpus.size());
  for (const SentencePair& pair : corpus) {
    slots.push_back(DecodeOne(pair, options, model));
  }
  GenerationResult result = Gather(slots);
  result.model_identity = model.Identity();
  return result;
}

GenerationResult GeneratePseudoRefs(const Corpus& corpus, const GenerationRun& run,
                                    const ModelFactory& factory) {
  CheckRun(run);
  if (run.execution == Execution::kSerial) {
    std::unique_ptr<TranslationModel> model = factory();
    return GeneratePseudoRefsSerial(corpus, run, *model);
  }
  int workers = run.workers > 0 ? run.workers : omp_get_max_threads();
  workers = static_cast<int>(
      std::clamp<std::size_t>(corpus.size(), 1, static_cast<std::size_t>(workers)));

  std::vector<std::unique_ptr<TranslationModel>> models;
  for (int w = 0; w < workers; ++w) {
    models.push_back(factory());
    models.back()->CheckReachable();
  }

  const DecodeOptions options = OptionsFor(run);
  std::vector<Slot> slots(corpus.size());
#pragma omp parallel num_threads(workers)
  {
    TranslationModel& model = *models[omp_get_thread_num()];
#pragma omp for schedule(dynamic, 8)
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      slots[i] = DecodeOne(corpus[i], options, model);
    }
  }
  GenerationResult result = Gather(slots);
  result.model_identity = models.front()->Identity();
  return result;
}

void WriteManifest(const GenerationRun& run, const GenerationResult& result,
                   const std::vector<std::pair<std::string, std::string>>& extra,
                   const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  out << "format=refsmith-manifest v1\n";
  out << "k=" << run.k << '\n';
  out << "beam_size=" << run.beam_size << '\n';
  out << "max_length=" << (run.max_length ? std::to_string(run.max_length) : "auto")
      << '\n';
  out << "model=" << OneLine(result.model_identity) << '\n';
  for (const auto& [key, value] : extra) out << key << '=' << OneLine(value) << '\n';
  out << "pairs=" << result.pairs << '\n';
  out << "generated=" << result.scored.size() << '\n';
  out << "failed=" << result.failures.size() << '\n';
  out << "failed_ids=";
  for (std::size_t i = 0; i < result.failures.size(); ++i) {
    if (i) out << ',';
    out << result.failures[i].pair_id;
  }
  out << '\n';
  for (const GenerationFailure& f : result.failures) {
    const std::string key = "failure." + std::to_string(f.pair_id);
    out << key << '=' << (f.protocol ? "protocol: " : "decode: ")
        << OneLine(f.message) << '\n';
    if (!f.raw.empty()) out << key << ".raw=" << OneLine(f.raw) << '\n';
  }
  FinishWrite(out, path);
}

std::size_t TopFractionCount(double fraction, std::size_t n) {
  const double exact = fraction * static_cast<double>(n);
  const auto count = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::min(count, n);
}

std::vector<ScoredSentence> FilterTop(const std::vector<ScoredSentence>& scored,
                                      const FilterPolicy& policy) {
  if (scored.empty()) throw DataError("nothing to filter: score table is empty");
  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<std::size_t> keep;
  if (policy.mode == FilterPolicy::Mode::kTopFraction) {
    if (!(policy.top_fraction > 0.0 && policy.top_fraction <= 1.0)) {
      throw UsageError("top fraction must be in (0, 1]");
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scored[a].bleu != scored[b].bleu) return scored[a].bleu > scored[b].bleu;
      return scored[a].pair_id < scored[b].pair_id;
    });
    order.resize(TopFractionCount(policy.top_fraction, scored.size()));
    keep = std::move(order);
  } else {
    if (!(policy.min_bleu >= 0.0 && policy.min_bleu <= 100.0)) {
      throw UsageError("min BLEU must be in [0, 100]");
    }
    for (std::size_t i : order) {
      if (scored[i].bleu >= policy.min_bleu) keep.push_back(i);
    }
  }
  std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    if (scored[a].pair_id != scored[b].pair_id) {
      return scored[a].pair_id < scored[b].pair_id;
    }
    return a < b;
  });
  std::vector<ScoredSentence> selected;
  selected.reserve(keep.size());
  for (std::size_t i : keep) selected.push_back(scored[i]);
  return selected;
}

Corpus AugmentCorpus(const Corpus& original,
                     const std::vector<ScoredSentence>& selected) {
  std::unordered_map<std::size_t, std::size_t> by_id;
  by_id.reserve(original.size());
  for (std::size_t i = 0; i < original.size(); ++i) by_id.emplace(original[i].id, i);

  Corpus out = original;
  out.reserve(original.size() + selected.size());
  for (const ScoredSentence& s : selected) {
    const auto it = by_id.find(s.pair_id);
    if (it == by_id.end()) {
      throw DataError("selected pair id " + std::to_string(s.pair_id) +
                      " is not in the original corpus");
    }
    out.push_back({out.size() + 1, original[it->second].source, s.pseudo_target});
  }
  return out;
}

}  // namespace refsmith
