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

#include "refsmith/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "em_kernels.hpp"
#include "refsmith/error.hpp"
#include "refsmith/text_format.hpp"

namespace refsmith {

namespace {

using detail::EmProblem;
using detail::EStepResult;
using detail::PriorSpec;

EStepResult RunEStep(const EmProblem& problem, const std::vector<double>& probs,
                     const PriorSpec& prior, const EmConfig& config) {
  if (config.execution == Execution::kSerial) {
    return detail::EStepSerial(problem, probs, prior);
  }
  return detail::EStepParallel(problem, probs, prior, config.workers);
}

// Row-normalizes expected counts into probs. Returns the largest row error.
double MStep(const EmProblem& problem, const std::vector<double>& counts,
             std::vector<double>& probs) {
  double worst = 0.0;
  for (std::size_t r = 0; r + 1 < problem.row_offset.size(); ++r) {
    const std::size_t begin = problem.row_offset[r];
    const std::size_t end = problem.row_offset[r + 1];
    if (begin == end) continue;
    double total = 0.0;
    for (std::size_t c = begin; c < end; ++c) total += counts[c];
    double sum = 0.0;
    for (std::size_t c = begin; c < end; ++c) {
      probs[c] = total > 0.0 ? counts[c] / total
                             : 1.0 / static_cast<double>(end - begin);
      sum += probs[c];
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

// Drops cells below min_prob and renormalizes the survivors of each row.
TranslationTable ExportTable(const EmProblem& problem,
                             const std::vector<double>& probs, double min_prob) {
  TranslationTable table;
  table.set_floor(min_prob);
  for (std::size_t r = 0; r + 1 < problem.row_offset.size(); ++r) {
    const std::size_t begin = problem.row_offset[r];
    const std::size_t end = problem.row_offset[r + 1];
    if (begin == end) continue;
    double kept = 0.0;
    std::size_t best = begin;
    for (std::size_t c = begin; c < end; ++c) {
      if (probs[c] >= min_prob) kept += probs[c];
      if (probs[c] > probs[best]) best = c;
    }
    const std::string& source = problem.source_words[r];
    if (kept <= 0.0) {
      table.set(source, problem.target_words[problem.cell_target[best]], 1.0);
      continue;
    }
    for (std::size_t c = begin; c < end; ++c) {
      if (probs[c] >= min_prob) {
        table.set(source, problem.target_words[problem.cell_target[c]],
                  probs[c] / kept);
      }
    }
  }
  return table;
}

// Expected diagonal feature per target token under the prior alone, summed
// over the corpus length histogram.
double ModelFeature(const std::map<std::pair<std::size_t, std::size_t>, std::size_t>&
                        sizes,
                    double tension, std::size_t tokens) {
  double total = 0.0;
  for (const auto& [mn, count] : sizes) {
    const auto [m, n] = mn;
    for (std::size_t t = 1; t <= n; ++t) {
      double z = 0.0, weighted = 0.0;
      for (std::size_t s = 1; s <= m; ++s) {
        const double h = DiagonalFeature(s, t, m, n);
        const double u = std::exp(tension * h);
        z += u;
        weighted += u * h;
      }
      total += static_cast<double>(count) * weighted / z;
    }
  }
  return total / static_cast<double>(tokens);
}

struct EmOutcome {
  TranslationTable table;
  double tension = 0.0;
};

EmOutcome RunEm(const Corpus& corpus, const EmConfig& config, bool diagonal,
                const DiagonalConfig& diag, TrainingTrace* trace) {
  CheckEmConfig(config);
  if (corpus.empty()) throw UsageError("cannot train on an empty corpus");
  if (diagonal && !(diag.initial_tension >= 0.0)) {
    throw UsageError("diagonal tension must be non-negative");
  }
  const EmProblem problem = detail::BuildProblem(corpus, config.null_weight > 0.0);

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> sizes;
  if (diagonal) {
    for (std::size_t i = 0; i < problem.source.size(); ++i) {
      ++sizes[{problem.source[i].size(), problem.target[i].size()}];
    }
  }

  std::vector<double> probs(problem.cell_count(),
                            1.0 / static_cast<double>(problem.target_words.size()));
  PriorSpec prior{config.null_weight, diag.initial_tension, diagonal};
  if (trace) *trace = TrainingTrace{};

  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    const EStepResult expected = RunEStep(problem, probs, prior, config);
    const double row_error = MStep(problem, expected.counts, probs);
    if (diagonal && diag.optimize_tension) {
      const double empirical =
          expected.feature / static_cast<double>(expected.tokens);
      for (std::size_t step = 0; step < diag.tension_steps; ++step) {
        const double model = ModelFeature(sizes, prior.tension, expected.tokens);
        prior.tension += diag.tension_step_size * (empirical - model);
        prior.tension = std::clamp(prior.tension, diag.min_tension, diag.max_tension);
      }
    }
    if (trace) {
      trace->log_likelihood.push_back(expected.log_likelihood);
      trace->max_row_error.push_back(row_error);
      if (diagonal) trace->tension.push_back(prior.tension);
      trace->target_tokens = expected.tokens;
    }
  }
  if (trace) {
    trace->log_likelihood.push_back(
        RunEStep(problem, probs, prior, config).log_likelihood);
  }

  EmOutcome outcome{ExportTable(problem, probs, config.min_prob), prior.tension};
  outcome.table.set_note("direction", "source->target");
  outcome.table.set_note("iterations", std::to_string(config.iterations));
  outcome.table.set_note("null_weight", FormatDouble(config.null_weight));
  outcome.table.set_note("model", diagonal ? "model2-diag" : "model1");
  if (diagonal) outcome.table.set_note("tension", FormatDouble(prior.tension));
  return outcome;
}

}  // namespace

void CheckEmConfig(const EmConfig& config) {
  if (config.iterations < 1) throw UsageError("EM needs at least 1 iteration");
  if (!(config.null_weight >= 0.0 && config.null_weight < 1.0)) {
    throw UsageError("null_weight must be in [0, 1)");
  }
  if (!(config.min_prob >= 0.0 && config.min_prob < 1.0)) {
    throw UsageError("min_prob must be in [0, 1)");
  }
}

double DiagonalFeature(std::size_t s, std::size_t t, std::size_t m,
                       std::size_t n) {
  return -std::abs(static_cast<double>(s) / static_cast<double>(m) -
                   static_cast<double>(t) / static_cast<double>(n));
}

TranslationTable TrainModel1(const Corpus& corpus, const EmConfig& config,
                             TrainingTrace* trace) {
  return RunEm(corpus, config, false, DiagonalConfig{}, trace).table;
}

Model2Params TrainModel2Diag(const Corpus& corpus, const EmConfig& config,
                             const DiagonalConfig& diagonal,
                             TrainingTrace* trace) {
  EmOutcome outcome = RunEm(corpus, config, true, diagonal, trace);
  return Model2Params{std::move(outcome.table), outcome.tension,
                      config.null_weight};
}

Alignment ViterbiAlign(const SentencePair& pair, const TranslationTable& table,
                       bool use_null) {
  std::vector<Link> links;
  for (std::size_t t = 1; t <= pair.target.size(); ++t) {
    const Token& y = pair.target[t - 1];
    double best = -1.0;
    std::size_t best_s = 0;
    if (use_null) best = table.lookup(kNullWord, y);
    for (std::size_t s = 1; s <= pair.source.size(); ++s) {
      const double p = table.lookup(pair.source[s - 1], y);
      if (p > best) {
        best = p;
        best_s = s;
      }
    }
    if (best_s > 0) links.push_back({best_s, t});
  }
  return Alignment(std::move(links));
}

Alignment ViterbiAlign(const SentencePair& pair, const Model2Params& params) {
  const std::size_t m = pair.source.size();
  const std::size_t n = pair.target.size();
  const bool use_null = params.null_weight > 0.0;
  const PriorSpec spec{params.null_weight, params.tension, true};
  std::vector<double> prior;
  std::vector<Link> links;
  for (std::size_t t = 1; t <= n; ++t) {
    detail::LinkPrior(spec, t, m, n, &prior);
    const Token& y = pair.target[t - 1];
    double best = -1.0;
    std::size_t best_s = 0;
    if (use_null) best = prior[0] * params.table.lookup(kNullWord, y);
    for (std::size_t s = 1; s <= m; ++s) {
      const double p = prior[s] * params.table.lookup(pair.source[s - 1], y);
      if (p > best) {
        best = p;
        best_s = s;
      }
    }
    if (best_s > 0) links.push_back({best_s, t});
  }
  return Alignment(std::move(links));
}

std::vector<Alignment> AlignCorpus(const Corpus& corpus,
                                   const TranslationTable& table, bool use_null) {
  std::vector<Alignment> out(corpus.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out[i] = ViterbiAlign(corpus[i], table, use_null);
  }
  return out;
}

std::vector<Alignment> AlignCorpus(const Corpus& corpus,
                                   const Model2Params& params) {
  std::vector<Alignment> out(corpus.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out[i] = ViterbiAlign(corpus[i], params);
  }
  return out;
}

Model2Params Model2FromTable(TranslationTable table) {
  Model2Params params;
  const auto& notes = table.notes();
  const auto tension = notes.find("tension");
  const auto null_weight = notes.find("null_weight");
  if (tension == notes.end() || !ParseDouble(tension->second, &params.tension) ||
      params.tension < 0.0) {
    throw DataError("table has no valid 'tension' note; train it with model2");
  }
  if (null_weight != notes.end() &&
      (!ParseDouble(null_weight->second, &params.null_weight) ||
       params.null_weight < 0.0 || params.null_weight >= 1.0)) {
    throw DataError("table has an invalid 'null_weight' note");
  }
  params.table = std::move(table);
  return params;
}

}  // namespace refsmith
