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


// Brute-force reference computations. Each one is written independently of
// the library code path it checks.

#ifndef REFSMITH_TESTS_ORACLES_HPP_
#define REFSMITH_TESTS_ORACLES_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "refsmith/corpus.hpp"

namespace refsmith::oracle {

// BLEU-4 by direct scanning of n-gram occurrences.
double NaiveBleu(const Sentence& candidate, const std::vector<Sentence>& references,
                 bool add_one);

// Enumerates every (s, t) cell of an m x n grid against the alignment.
std::size_t AnticipatedByEnumeration(std::size_t m, std::size_t n,
                                     const Alignment& a, std::size_t k);
std::size_t UncoveredByEnumeration(std::size_t m, std::size_t n, const Alignment& a);

// Textbook IBM Model 1 EM over string maps. t[(f, e)] = t(e | f); NULL is "".
struct Model1Result {
  std::map<std::pair<std::string, std::string>, double> t;
  std::vector<double> log_likelihood;  // one per iteration, before its M-step
};
Model1Result Model1(const Corpus& corpus, std::size_t iterations, double null_weight);

// Corpus log-likelihood under a diagonal prior with the given tension and a
// fixed lexical scorer t(e | f) ("" for NULL).
double DiagonalLogLikelihood(
    const Corpus& corpus, double tension, double null_weight,
    const std::function<double(const std::string&, const std::string&)>& t);

// Best alignment by enumerating all (m+1)^n functions from target positions
// to source positions (0 = NULL, skipped when !use_null). The first maximum in
// lexicographic order wins.
Alignment ExhaustiveViterbi(std::size_t m, std::size_t n, bool use_null,
                            const std::function<double(std::size_t, std::size_t)>& weight);

}  // namespace refsmith::oracle

#endif  // REFSMITH_TESTS_ORACLES_HPP_
