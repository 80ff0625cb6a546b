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


#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace refsmith::oracle {

namespace {

bool SameGram(const Sentence& a, std::size_t i, const Sentence& b, std::size_t j,
              std::size_t n) {
  for (std::size_t x = 0; x < n; ++x) {
    if (a[i + x] != b[j + x]) return false;
  }
  return true;
}

std::size_t Occurrences(const Sentence& haystack, const Sentence& gram_src,
                        std::size_t at, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t j = 0; j + n <= haystack.size(); ++j) {
    if (SameGram(gram_src, at, haystack, j, n)) ++count;
  }
  return count;
}

}  // namespace

double NaiveBleu(const Sentence& candidate, const std::vector<Sentence>& references,
                 bool add_one) {
  const double c = static_cast<double>(candidate.size());
  std::size_t best = references[0].size();
  for (const Sentence& r : references) {
    const long d = std::labs(static_cast<long>(r.size()) - static_cast<long>(candidate.size()));
    const long db = std::labs(static_cast<long>(best) - static_cast<long>(candidate.size()));
    if (d < db || (d == db && r.size() < best)) best = r.size();
  }
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (candidate.size() < n) continue;
    std::size_t total = candidate.size() - n + 1;
    std::size_t clipped = 0;
    for (std::size_t i = 0; i + n <= candidate.size(); ++i) {
      bool first = true;
      for (std::size_t j = 0; j < i; ++j) {
        if (SameGram(candidate, i, candidate, j, n)) first = false;
      }
      if (!first) continue;
      const std::size_t own = Occurrences(candidate, candidate, i, n);
      std::size_t ref_max = 0;
      for (const Sentence& r : references) {
        ref_max = std::max(ref_max, Occurrences(r, candidate, i, n));
      }
      clipped += std::min(own, ref_max);
    }
    double num = static_cast<double>(clipped);
    double den = static_cast<double>(total);
    if (add_one && n >= 2) {
      num += 1;
      den += 1;
    }
    if (num == 0) return 0.0;
    log_sum += std::log(num / den);
  }
  const double r = static_cast<double>(best);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

std::size_t AnticipatedByEnumeration(std::size_t m, std::size_t n,
                                     const Alignment& a, std::size_t k) {
  std::size_t count = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    bool hit = false;
    for (std::size_t s = 1; s <= m; ++s) {
      if (a.contains({s, t}) && s >= t + k) hit = true;
    }
    count += hit;
  }
  return count;
}

std::size_t UncoveredByEnumeration(std::size_t m, std::size_t n, const Alignment& a) {
  std::size_t count = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    bool covered = false;
    for (std::size_t s = 1; s <= m; ++s) {
      if (a.contains({s, t})) covered = true;
    }
    count += !covered;
  }
  return count;
}

Model1Result Model1(const Corpus& corpus, std::size_t iterations, double null_weight) {
  Model1Result result;
  std::set<std::string> target_vocab;
  for (const auto& pair : corpus) {
    for (const auto& e : pair.target) target_vocab.insert(e);
  }
  const double init = 1.0 / static_cast<double>(target_vocab.size());
  const bool use_null = null_weight > 0.0;
  auto prob = [&](const std::string& f, const std::string& e) {
    const auto it = result.t.find({f, e});
    return it == result.t.end() ? init : it->second;
  };
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    std::map<std::pair<std::string, std::string>, double> counts;
    double ll = 0.0;
    for (const auto& pair : corpus) {
      const double m = static_cast<double>(pair.source.size());
      for (const auto& e : pair.target) {
        double z = use_null ? null_weight * prob("", e) : 0.0;
        for (const auto& f : pair.source) z += (1.0 - null_weight) / m * prob(f, e);
        ll += std::log(z);
        if (use_null) counts[{"", e}] += null_weight * prob("", e) / z;
        for (const auto& f : pair.source) {
          counts[{f, e}] += (1.0 - null_weight) / m * prob(f, e) / z;
        }
      }
    }
    result.log_likelihood.push_back(ll);
    std::map<std::string, double> totals;
    for (const auto& [fe, c] : counts) totals[fe.first] += c;
    result.t.clear();
    for (const auto& [fe, c] : counts) result.t[fe] = c / totals[fe.first];
  }
  return result;
}

double DiagonalLogLikelihood(
    const Corpus& corpus, double tension, double null_weight,
    const std::function<double(const std::string&, const std::string&)>& t) {
  double ll = 0.0;
  for (const auto& pair : corpus) {
    const double m = static_cast<double>(pair.source.size());
    const double n = static_cast<double>(pair.target.size());
    for (std::size_t j = 1; j <= pair.target.size(); ++j) {
      double z = 0.0;
      for (std::size_t i = 1; i <= pair.source.size(); ++i) {
        z += std::exp(-tension * std::fabs(i / m - j / n));
      }
      double p = null_weight > 0.0 ? null_weight * t("", pair.target[j - 1]) : 0.0;
      for (std::size_t i = 1; i <= pair.source.size(); ++i) {
        p += (1.0 - null_weight) * std::exp(-tension * std::fabs(i / m - j / n)) / z *
             t(pair.source[i - 1], pair.target[j - 1]);
      }
      ll += std::log(p);
    }
  }
  return ll;
}

Alignment ExhaustiveViterbi(std::size_t m, std::size_t n, bool use_null,
                            const std::function<double(std::size_t, std::size_t)>& weight) {
  const std::size_t lo = use_null ? 0 : 1;
  std::vector<std::size_t> a(n, lo), best;
  double best_score = -1.0;
  for (;;) {
    double score = 1.0;
    for (std::size_t t = 1; t <= n; ++t) score *= weight(a[t - 1], t);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
    std::size_t pos = n;
    while (pos > 0) {
      if (a[pos - 1] < m) {
        ++a[pos - 1];
        break;
      }
      a[pos - 1] = lo;
      --pos;
    }
    if (pos == 0) break;
  }
  Alignment out;
  for (std::size_t t = 1; t <= n; ++t) {
    if (best[t - 1] > 0) out.insert({best[t - 1], t});
  }
  return out;
}

}  // namespace refsmith::oracle
