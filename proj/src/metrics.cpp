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

#include "refsmith/metrics.hpp"

#include <string>

#include "refsmith/error.hpp"
#include "refsmith/text_format.hpp"

namespace refsmith {

namespace {

void CheckParallel(std::size_t corpus_size, std::size_t alignment_count) {
  if (corpus_size != alignment_count) {
    throw DataError("corpus has " + std::to_string(corpus_size) +
                    " pairs but " + std::to_string(alignment_count) +
                    " alignments were given");
  }
}

void Finish(RateReport& report) {
  report.corpus_mean = report.tokens == 0
                           ? 0.0
                           : static_cast<double>(report.flagged) /
                                 static_cast<double>(report.tokens);
}

}  // namespace

bool KAnticipated(std::size_t t, const Alignment& alignment, std::size_t k) {
  for (const Link& link : alignment) {
    if (link.target == t && link.source >= t + k) return true;
  }
  return false;
}

std::size_t CountAnticipated(std::size_t target_length,
                             const Alignment& alignment, std::size_t k) {
  std::vector<char> flagged(target_length + 1, 0);
  for (const Link& link : alignment) {
    if (link.target <= target_length && link.source >= link.target + k) {
      flagged[link.target] = 1;
    }
  }
  std::size_t count = 0;
  for (std::size_t t = 1; t <= target_length; ++t) count += flagged[t];
  return count;
}

double AnticipationRate(const SentencePair& pair, const Alignment& alignment,
                        std::size_t k) {
  if (pair.target.empty()) throw DataError("anticipation rate of an empty target");
  return static_cast<double>(CountAnticipated(pair.target.size(), alignment, k)) /
         static_cast<double>(pair.target.size());
}

std::size_t CountHallucinated(std::size_t hypothesis_length,
                              const Alignment& alignment) {
  std::vector<char> covered(hypothesis_length + 1, 0);
  for (const Link& link : alignment) {
    if (link.target <= hypothesis_length) covered[link.target] = 1;
  }
  std::size_t count = 0;
  for (std::size_t t = 1; t <= hypothesis_length; ++t) count += !covered[t];
  return count;
}

double HallucinationRate(const Sentence& hypothesis, const Alignment& alignment) {
  if (hypothesis.empty()) throw DataError("hallucination rate of an empty hypothesis");
  return static_cast<double>(CountHallucinated(hypothesis.size(), alignment)) /
         static_cast<double>(hypothesis.size());
}

AnticipationReport BuildAnticipationReport(const Corpus& corpus,
                                           const std::vector<Alignment>& alignments,
                                           std::size_t k) {
  CheckParallel(corpus.size(), alignments.size());
  if (k < 1) throw UsageError("k must be at least 1");
  AnticipationReport report;
  report.k = k;
  report.per_sentence.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t n = corpus[i].target.size();
    const std::size_t flagged = CountAnticipated(n, alignments[i], k);
    report.per_sentence.emplace_back(
        corpus[i].id, static_cast<double>(flagged) / static_cast<double>(n));
    report.flagged += flagged;
    report.tokens += n;
  }
  Finish(report);
  return report;
}

HallucinationReport BuildHallucinationReport(
    const Corpus& corpus, const std::vector<Alignment>& alignments) {
  CheckParallel(corpus.size(), alignments.size());
  HallucinationReport report;
  report.per_sentence.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t n = corpus[i].target.size();
    const std::size_t flagged = CountHallucinated(n, alignments[i]);
    report.per_sentence.emplace_back(
        corpus[i].id, static_cast<double>(flagged) / static_cast<double>(n));
    report.flagged += flagged;
    report.tokens += n;
  }
  Finish(report);
  return report;
}

void WriteRateReport(const RateReport& report, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  for (const auto& [id, value] : report.per_sentence) {
    out << id << '\t' << FormatDouble(value) << '\n';
  }
  out << "# corpus_mean\t" << FormatDouble(report.corpus_mean) << '\n';
  FinishWrite(out, path);
}

}  // namespace refsmith
