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

#ifndef REFSMITH_BLEU_HPP_
#define REFSMITH_BLEU_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "refsmith/corpus.hpp"

namespace refsmith {

inline constexpr std::size_t kBleuOrder = 4;

// Sufficient statistics of BLEU-4. Index n-1 holds order n.
struct BleuStats {
  std::array<std::size_t, kBleuOrder> clipped{};
  std::array<std::size_t, kBleuOrder> candidate{};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;  // effective (closest) reference length

  BleuStats& operator+=(const BleuStats& other);
};

enum class Smoothing {
  kNone,
  // Add one to numerator and denominator of orders 2..4 only.
  kAddOne,
};

// Clipped counts take the maximum count over references; the effective
// reference length is the one closest to the candidate, shorter on ties.
BleuStats ComputeBleuStats(const Sentence& candidate,
                           std::span<const Sentence> references);

// Orders with no candidate n-grams are left out of the geometric mean.
double BleuFromStats(const BleuStats& stats, Smoothing smoothing);

// Smoothed sentence BLEU in [0, 100]. Throws DataError for an empty candidate
// or an empty reference set.
double SentenceBleu(const Sentence& candidate,
                    std::span<const Sentence> references);

// Unsmoothed BLEU over pooled statistics. reference_sets[i] holds every
// reference of candidates[i].
double CorpusBleu(const std::vector<Sentence>& candidates,
                  const std::vector<std::vector<Sentence>>& reference_sets);

struct HistogramBin {
  double low = 0.0;
  std::size_t count = 0;
};

// Bins [0, w), [w, 2w), ... over [0, 100]; the last bin is closed at 100.
std::vector<HistogramBin> BleuHistogram(std::span<const double> scores,
                                        double bin_width);

void WriteHistogram(const std::vector<HistogramBin>& bins,
                    const std::filesystem::path& path);

}  // namespace refsmith

#endif  // REFSMITH_BLEU_HPP_
