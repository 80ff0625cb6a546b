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

#include "refsmith/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "refsmith/error.hpp"
#include "refsmith/text_format.hpp"

namespace refsmith {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts CountNgrams(const Sentence& sentence, std::size_t order) {
  NgramCounts counts;
  if (sentence.size() < order) return counts;
  for (std::size_t i = 0; i + order <= sentence.size(); ++i) {
    std::string key = sentence[i];
    for (std::size_t j = 1; j < order; ++j) {
      key += ' ';
      key += sentence[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    clipped[n] += other.clipped[n];
    candidate[n] += other.candidate[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats ComputeBleuStats(const Sentence& candidate,
                           std::span<const Sentence> references) {
  if (references.empty()) throw DataError("BLEU needs at least one reference");
  BleuStats stats;
  stats.candidate_length = candidate.size();

  std::size_t best = references[0].size();
  for (const Sentence& ref : references) {
    const auto distance = [&](std::size_t len) {
      return len > candidate.size() ? len - candidate.size()
                                    : candidate.size() - len;
    };
    const std::size_t d = distance(ref.size());
    const std::size_t d_best = distance(best);
    if (d < d_best || (d == d_best && ref.size() < best)) best = ref.size();
  }
  stats.reference_length = best;

  for (std::size_t order = 1; order <= kBleuOrder; ++order) {
    const NgramCounts cand = CountNgrams(candidate, order);
    NgramCounts max_ref;
    for (const Sentence& ref : references) {
      for (const auto& [gram, count] : CountNgrams(ref, order)) {
        std::size_t& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    std::size_t clipped = 0, total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      const auto it = max_ref.find(gram);
      if (it != max_ref.end()) clipped += std::min(count, it->second);
    }
    stats.clipped[order - 1] = clipped;
    stats.candidate[order - 1] = total;
  }
  return stats;
}

double BleuFromStats(const BleuStats& stats, Smoothing smoothing) {
  if (stats.candidate_length == 0) return 0.0;
  double log_precision = 0.0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    if (stats.candidate[n] == 0) continue;
    double num = static_cast<double>(stats.clipped[n]);
    double den = static_cast<double>(stats.candidate[n]);
    if (smoothing == Smoothing::kAddOne && n > 0) {
      num += 1.0;
      den += 1.0;
    }
    if (num == 0.0) return 0.0;
    log_precision += std::log(num / den);
  }
  log_precision /= static_cast<double>(kBleuOrder);
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double log_bp = c < r ? 1.0 - r / c : 0.0;
  return 100.0 * std::exp(log_bp + log_precision);
}

double SentenceBleu(const Sentence& candidate,
                    std::span<const Sentence> references) {
  if (candidate.empty()) throw DataError("BLEU of an empty candidate");
  return BleuFromStats(ComputeBleuStats(candidate, references), Smoothing::kAddOne);
}

double CorpusBleu(const std::vector<Sentence>& candidates,
                  const std::vector<std::vector<Sentence>>& reference_sets) {
  if (candidates.size() != reference_sets.size()) {
    throw DataError("corpus BLEU: " + std::to_string(candidates.size()) +
                    " candidates but " + std::to_string(reference_sets.size()) +
                    " reference sets");
  }
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    total += ComputeBleuStats(candidates[i], reference_sets[i]);
  }
  return BleuFromStats(total, Smoothing::kNone);
}

std::vector<HistogramBin> BleuHistogram(std::span<const double> scores,
                                        double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw UsageError("histogram bin width must be positive");
  }
  const auto bin_count = static_cast<std::size_t>(
      std::max(1.0, std::ceil(100.0 / bin_width - 1e-9)));
  std::vector<HistogramBin> bins(bin_count);
  for (std::size_t b = 0; b < bin_count; ++b) {
    // Rounded so edges like 3 * 0.1 print and compare as 0.3.
    bins[b].low = std::round(static_cast<double>(b) * bin_width * 1e9) / 1e9;
  }
  for (const double score : scores) {
    if (!(score >= 0.0 && score <= 100.0)) {
      throw DataError("BLEU score " + FormatDouble(score) + " outside [0,100]");
    }
    const double q = score / bin_width;
    const double nearest = std::round(q);
    const double index =
        std::abs(q - nearest) <= 1e-9 * std::max(1.0, q) ? nearest : std::floor(q);
    const auto b = static_cast<std::size_t>(index);
    ++bins[std::min(b, bin_count - 1)].count;
  }
  return bins;
}

void WriteHistogram(const std::vector<HistogramBin>& bins,
                    const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  for (const HistogramBin& bin : bins) {
    out << FormatDouble(bin.low) << '\t' << bin.count << '\n';
  }
  FinishWrite(out, path);
}

}  // namespace refsmith
