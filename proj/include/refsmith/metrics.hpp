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

#ifndef REFSMITH_METRICS_HPP_
#define REFSMITH_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <utility>
#include <vector>

#include "refsmith/corpus.hpp"

namespace refsmith {

// A target word y_t is k-anticipated when it links to some x_s with s >= t + k,
// i.e. to a source word the wait-k schedule has not read yet.
bool KAnticipated(std::size_t t, const Alignment& alignment, std::size_t k);

// Number of k-anticipated positions among 1..target_length.
std::size_t CountAnticipated(std::size_t target_length,
                             const Alignment& alignment, std::size_t k);

// AR_k: fraction of target positions that are k-anticipated.
double AnticipationRate(const SentencePair& pair, const Alignment& alignment,
                        std::size_t k);

// Number of hypothesis positions with no link at all.
std::size_t CountHallucinated(std::size_t hypothesis_length,
                              const Alignment& alignment);

// HR: fraction of hypothesis positions that no source word aligns to.
double HallucinationRate(const Sentence& hypothesis, const Alignment& alignment);

// Per-sentence rates plus their micro-average (flagged tokens / tokens).
struct RateReport {
  std::vector<std::pair<std::size_t, double>> per_sentence;  // (pair_id, rate)
  std::size_t flagged = 0;
  std::size_t tokens = 0;
  double corpus_mean = 0.0;
};

struct AnticipationReport : RateReport {
  std::size_t k = 1;
};

using HallucinationReport = RateReport;

AnticipationReport BuildAnticipationReport(const Corpus& corpus,
                                           const std::vector<Alignment>& alignments,
                                           std::size_t k);

// corpus supplies the (source, hypothesis) pairs; alignments are over them.
HallucinationReport BuildHallucinationReport(
    const Corpus& corpus, const std::vector<Alignment>& alignments);

// "pair_id<TAB>value" lines and a trailing "# corpus_mean<TAB>value".
void WriteRateReport(const RateReport& report, const std::filesystem::path& path);

}  // namespace refsmith

#endif  // REFSMITH_METRICS_HPP_
