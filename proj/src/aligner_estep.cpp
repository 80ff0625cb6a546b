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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "em_kernels.hpp"
#include "refsmith/aligner.hpp"
#include "refsmith/error.hpp"
#include "refsmith/translation_table.hpp"

namespace refsmith::detail {

namespace {

constexpr std::size_t kBlocks = 16;

WordId Intern(std::unordered_map<std::string, WordId>& index,
              std::vector<std::string>& words, const std::string& word) {
  const auto [it, inserted] =
      index.emplace(word, static_cast<WordId>(words.size()));
  if (inserted) words.push_back(word);
  return it->second;
}

// Adds one sentence's expected counts into result. prior is scratch space.
void AccumulateSentence(const EmProblem& problem, const std::vector<double>& probs,
                        const PriorSpec& spec, std::size_t index,
                        std::vector<double>& prior, std::vector<double>& weight,
                        std::vector<std::size_t>& cells, EStepResult& result) {
  const auto& src = problem.source[index];
  const auto& tgt = problem.target[index];
  const std::size_t m = src.size();
  const std::size_t n = tgt.size();
  weight.resize(m + 1);
  cells.resize(m + 1);
  for (std::size_t t = 1; t <= n; ++t) {
    LinkPrior(spec, t, m, n, &prior);
    const WordId y = tgt[t - 1];
    double sum = 0.0;
    if (problem.use_null) {
      cells[0] = problem.cell(0, y);
      weight[0] = prior[0] * probs[cells[0]];
      sum += weight[0];
    }
    for (std::size_t s = 1; s <= m; ++s) {
      cells[s] = problem.cell(src[s - 1], y);
      weight[s] = prior[s] * probs[cells[s]];
      sum += weight[s];
    }
    result.log_likelihood += std::log(sum);
    if (problem.use_null) result.counts[cells[0]] += weight[0] / sum;
    for (std::size_t s = 1; s <= m; ++s) {
      const double posterior = weight[s] / sum;
      result.counts[cells[s]] += posterior;
      if (spec.diagonal) result.feature += posterior * DiagonalFeature(s, t, m, n);
    }
  }
  result.tokens += n;
}

}  // namespace

std::size_t EmProblem::cell(WordId source_id, WordId target_id) const {
  const auto first = cell_target.begin() + row_offset[source_id];
  const auto last = cell_target.begin() + row_offset[source_id + 1];
  return static_cast<std::size_t>(
      std::lower_bound(first, last, target_id) - cell_target.begin());
}

EmProblem BuildProblem(const Corpus& corpus, bool use_null) {
  EmProblem problem;
  problem.use_null = use_null;
  std::unordered_map<std::string, WordId> source_index, target_index;
  // Id 0 is reserved for NULL even when unused, so row ids are stable.
  Intern(source_index, problem.source_words, std::string(kNullWord));
  problem.source.reserve(corpus.size());
  problem.target.reserve(corpus.size());
  for (const SentencePair& pair : corpus) {
    std::vector<WordId> src, tgt;
    src.reserve(pair.source.size());
    tgt.reserve(pair.target.size());
    for (const Token& w : pair.source) {
      if (w == kNullWord) {
        throw DataError("pair " + std::to_string(pair.id) + ": source token '" +
                        std::string(kNullWord) + "' is reserved");
      }
      src.push_back(Intern(source_index, problem.source_words, w));
    }
    for (const Token& w : pair.target) {
      tgt.push_back(Intern(target_index, problem.target_words, w));
    }
    problem.source.push_back(std::move(src));
    problem.target.push_back(std::move(tgt));
  }

  std::vector<std::vector<WordId>> rows(problem.source_words.size());
  for (std::size_t i = 0; i < problem.source.size(); ++i) {
    for (WordId x : problem.source[i]) {
      auto& row = rows[x];
      row.insert(row.end(), problem.target[i].begin(), problem.target[i].end());
    }
  }
  if (use_null) {
    rows[0].resize(problem.target_words.size());
    for (WordId y = 0; y < rows[0].size(); ++y) rows[0][y] = y;
  }
  problem.row_offset.assign(rows.size() + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::sort(rows[r].begin(), rows[r].end());
    rows[r].erase(std::unique(rows[r].begin(), rows[r].end()), rows[r].end());
    problem.row_offset[r + 1] = problem.row_offset[r] + rows[r].size();
  }
  problem.cell_target.reserve(problem.row_offset.back());
  for (const auto& row : rows) {
    problem.cell_target.insert(problem.cell_target.end(), row.begin(), row.end());
  }
  return problem;
}

void LinkPrior(const PriorSpec& spec, std::size_t t, std::size_t m,
               std::size_t n, std::vector<double>* prior) {
  prior->assign(m + 1, 0.0);
  const double not_null = 1.0 - spec.null_weight;
  (*prior)[0] = spec.null_weight;
  if (!spec.diagonal) {
    const double uniform = not_null / static_cast<double>(m);
    for (std::size_t s = 1; s <= m; ++s) (*prior)[s] = uniform;
    return;
  }
  double z = 0.0;
  for (std::size_t s = 1; s <= m; ++s) {
    (*prior)[s] = std::exp(spec.tension * DiagonalFeature(s, t, m, n));
    z += (*prior)[s];
  }
  for (std::size_t s = 1; s <= m; ++s) (*prior)[s] *= not_null / z;
}

void EStepResult::Merge(const EStepResult& other) {
  for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += other.counts[c];
  log_likelihood += other.log_likelihood;
  feature += other.feature;
  tokens += other.tokens;
}

EStepResult EStepSerial(const EmProblem& problem,
                        const std::vector<double>& probs,
                        const PriorSpec& prior) {
  EStepResult result;
  result.counts.assign(problem.cell_count(), 0.0);
  std::vector<double> prior_buf, weight;
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < problem.source.size(); ++i) {
    AccumulateSentence(problem, probs, prior, i, prior_buf, weight, cells, result);
  }
  return result;
}

EStepResult EStepParallel(const EmProblem& problem,
                          const std::vector<double>& probs,
                          const PriorSpec& prior, int workers) {
  const std::size_t n = problem.source.size();
  const std::size_t blocks = std::max<std::size_t>(1, std::min(kBlocks, n));
  std::vector<EStepResult> partial(blocks);
  const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel num_threads(threads)
  {
    std::vector<double> prior_buf, weight;
    std::vector<std::size_t> cells;
#pragma omp for schedule(dynamic, 1)
    for (std::size_t b = 0; b < blocks; ++b) {
      EStepResult& local = partial[b];
      local.counts.assign(problem.cell_count(), 0.0);
      const std::size_t begin = b * n / blocks;
      const std::size_t end = (b + 1) * n / blocks;
      for (std::size_t i = begin; i < end; ++i) {
        AccumulateSentence(problem, probs, prior, i, prior_buf, weight, cells, local);
      }
    }
  }

  EStepResult result = std::move(partial[0]);
  for (std::size_t b = 1; b < blocks; ++b) result.Merge(partial[b]);
  return result;
}

}  // namespace refsmith::detail
