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

#ifndef REFSMITH_SRC_EM_KERNELS_HPP_
#define REFSMITH_SRC_EM_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "refsmith/corpus.hpp"

namespace refsmith::detail {

using WordId = std::uint32_t;

// Corpus interned to ids plus the sparse set of (source, target) cells that
// can receive probability mass. Source id 0 is NULL when use_null is set.
struct EmProblem {
  std::vector<std::string> source_words;
  std::vector<std::string> target_words;
  std::vector<std::vector<WordId>> source;
  std::vector<std::vector<WordId>> target;
  // CSR over source ids: cells of row r are [row_offset[r], row_offset[r+1]),
  // with cell_target sorted inside each row.
  std::vector<std::size_t> row_offset;
  std::vector<WordId> cell_target;
  bool use_null = false;

  std::size_t cell_count() const { return cell_target.size(); }
  std::size_t cell(WordId source_id, WordId target_id) const;
};

EmProblem BuildProblem(const Corpus& corpus, bool use_null);

struct PriorSpec {
  double null_weight = 0.0;
  double tension = 0.0;
  bool diagonal = false;
};

// Writes p(s | t) for s = 0..m into prior; prior[0] is the NULL mass (0 when
// NULL is disabled).
void LinkPrior(const PriorSpec& spec, std::size_t t, std::size_t m,
               std::size_t n, std::vector<double>* prior);

struct EStepResult {
  std::vector<double> counts;
  double log_likelihood = 0.0;
  // Sum over non-NULL links of posterior * DiagonalFeature.
  double feature = 0.0;
  std::size_t tokens = 0;

  void Merge(const EStepResult& other);
};

// Reference kernel: one sequential pass over the corpus.
EStepResult EStepSerial(const EmProblem& problem,
                        const std::vector<double>& probs,
                        const PriorSpec& prior);

// OpenMP kernel. Sentences are split into a fixed number of contiguous blocks
// that are merged in block order, so results do not depend on the thread count.
EStepResult EStepParallel(const EmProblem& problem,
                          const std::vector<double>& probs,
                          const PriorSpec& prior, int workers);

}  // namespace refsmith::detail

#endif  // REFSMITH_SRC_EM_KERNELS_HPP_
