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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "refsmith/aligner.hpp"
#include "refsmith/error.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace refsmith {
namespace {

Corpus SmallCorpus() {
  return {{1, {"a", "b"}, {"X", "Y"}}, {2, {"a"}, {"X"}}};
}

EmConfig Config(std::size_t iterations, double null_weight,
                Execution execution = Execution::kSerial) {
  EmConfig config;
  config.iterations = iterations;
  config.null_weight = null_weight;
  config.min_prob = 0.0;
  config.execution = execution;
  return config;
}

void CheckTablesClose(const TranslationTable& a, const TranslationTable& b, double tol) {
  REQUIRE(a.sources() == b.sources());
  for (const auto& src : a.sources()) {
    const auto ra = a.sorted_row(src);
    REQUIRE(ra.size() == b.sorted_row(src).size());
    for (const auto& e : ra) CHECK(std::abs(e.prob - b.prob(src, e.target)) <= tol);
  }
}

TEST_CASE("two-pair corpus concentrates a on X") {
  const TranslationTable table = TrainModel1(SmallCorpus(), Config(5, 0.0));
  CHECK(table.prob("a", "X") > 0.9);
}

TEST_CASE("single co-occurrence forces certainty") {
  const TranslationTable table = TrainModel1({{1, {"a"}, {"X"}}}, Config(1, 0.0));
  CHECK(table.prob("a", "X") == 1.0);
  CHECK_FALSE(table.has_source(kNullWord));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(TrainModel1({}, Config(5, 0.0)), UsageError);
  CHECK_THROWS_AS(TrainModel1(SmallCorpus(), Config(0, 0.0)), UsageError);
  CHECK_THROWS_AS(TrainModel1(SmallCorpus(), Config(5, 1.0)), UsageError);
  CHECK_THROWS_AS(TrainModel1(SmallCorpus(), Config(5, -0.1)), UsageError);
  EmConfig bad = Config(5, 0.0);
  bad.min_prob = -1;
  CHECK_THROWS_AS(TrainModel1(SmallCorpus(), bad), UsageError);
}

TEST_CASE("model 1 matches the brute-force EM oracle") {
  for (double null_weight : {0.0, 0.05, 0.3}) {
    CAPTURE(null_weight);
    const Corpus corpus = testing::RandomCorpus(40, 8, 6, 17);
    TrainingTrace trace;
    const TranslationTable table = TrainModel1(corpus, Config(4, null_weight), &trace);
    const oracle::Model1Result expected = oracle::Model1(corpus, 4, null_weight);
    REQUIRE(trace.log_likelihood.size() == 5);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(trace.log_likelihood[i] ==
            doctest::Approx(expected.log_likelihood[i]).epsilon(1e-12));
    }
    std::size_t entries = 0;
    for (const auto& [fe, p] : expected.t) {
      const std::string source = fe.first.empty() ? std::string(kNullWord) : fe.first;
      CHECK(std::abs(table.prob(source, fe.second) - p) < 1e-12);
      ++entries;
    }
    CHECK(table.entry_count() == entries);
  }
}

TEST_CASE("model 1 log-likelihood never decreases") {
  for (std::uint32_t seed = 1; seed <= 10; ++seed) {
    const Corpus corpus = testing::RandomCorpus(60, 12, 8, seed);
    TrainingTrace trace;
    TrainModel1(corpus, Config(8, seed % 2 ? 0.05 : 0.0), &trace);
    for (std::size_t i = 1; i < trace.log_likelihood.size(); ++i) {
      CHECK(trace.log_likelihood[i] >=
            trace.log_likelihood[i - 1] - 1e-9 * static_cast<double>(corpus.size()));
    }
    for (double e : trace.max_row_error) CHECK(e <= 1e-9);
  }
}

TEST_CASE("trained tables are normalized after pruning") {
  const Corpus corpus = testing::RandomCorpus(100, 20, 10, 3);
  EmConfig config = Config(5, 0.05);
  config.min_prob = 1e-3;
  const TranslationTable table = TrainModel1(corpus, config);
  CHECK(table.max_row_error() <= 1e-9);
  CHECK_NOTHROW(table.Validate());
  for (const auto& src : table.sources()) {
    for (const auto& e : table.sorted_row(src)) CHECK(e.prob >= 1e-3);
  }
  CHECK(table.floor() == 1e-3);
  CHECK(table.notes().at("direction") == "source->target");
}

TEST_CASE("parallel and serial E-steps agree for any thread count") {
  const Corpus corpus = testing::RandomCorpus(300, 30, 12, 9);
  TrainingTrace serial_trace;
  const TranslationTable serial = TrainModel1(corpus, Config(4, 0.05), &serial_trace);
  for (int workers : {1, 2, 3, 8}) {
    CAPTURE(workers);
    EmConfig config = Config(4, 0.05, Execution::kParallel);
    config.workers = workers;
    TrainingTrace trace;
    const TranslationTable parallel = TrainModel1(corpus, config, &trace);
    CheckTablesClose(serial, parallel, 1e-12);
    for (std::size_t i = 0; i < trace.log_likelihood.size(); ++i) {
      CHECK(std::abs(trace.log_likelihood[i] - serial_trace.log_likelihood[i]) <=
            1e-12 * std::abs(serial_trace.log_likelihood[i]));
    }
  }
  const Model2Params m2s = TrainModel2Diag(corpus, Config(3, 0.05));
  const Model2Params m2p = TrainModel2Diag(corpus, Config(3, 0.05, Execution::kParallel));
  CheckTablesClose(m2s.table, m2p.table, 1e-12);
  CHECK(std::abs(m2s.tension - m2p.tension) <= 1e-12);
}

TEST_CASE("parallel training is reproducible run to run") {
  const Corpus corpus = testing::RandomCorpus(200, 25, 10, 21);
  const EmConfig config = Config(3, 0.05, Execution::kParallel);
  const TranslationTable a = TrainModel1(corpus, config);
  const TranslationTable b = TrainModel1(corpus, config);
  CheckTablesClose(a, b, 0.0);
}

TEST_CASE("viterbi argmax, NULL and ties") {
  TranslationTable table;
  table.set("a", "X", 0.9);
  table.set("a", "Y", 0.1);
  table.set("b", "Y", 0.9);
  table.set("b", "X", 0.1);
  table.set(kNullWord, "X", 0.5);
  table.set(kNullWord, "Y", 0.5);
  table.set_floor(1e-6);
  CHECK(ViterbiAlign({1, {"a", "b"}, {"X", "Y"}}, table, true) == Alignment{{1, 1}, {2, 2}});

  // Unknown target word: every candidate scores the floor, NULL wins.
  CHECK(ViterbiAlign({1, {"a", "b"}, {"W"}}, table, true).empty());
  // Without NULL the tie goes to the first source position.
  CHECK(ViterbiAlign({1, {"a", "b"}, {"W"}}, table, false) == Alignment{{1, 1}});

  TranslationTable ties;
  for (const char* w : {"p", "q", "r", "s", "u"}) ties.set(w, "Z", 0.2);
  ties.set("q", "Z", 0.5);
  ties.set("u", "Z", 0.5);
  CHECK(ViterbiAlign({1, {"p", "q", "r", "s", "u"}, {"Z"}}, ties, false) ==
        Alignment{{2, 1}});
}

TEST_CASE("viterbi does not depend on table insertion order") {
  std::mt19937 rng(4);
  std::vector<std::pair<std::string, std::string>> cells;
  for (int s = 0; s < 6; ++s) {
    for (int t = 0; t < 6; ++t) cells.emplace_back("s" + std::to_string(s), "T" + std::to_string(t));
  }
  std::vector<double> probs(cells.size());
  for (auto& p : probs) p = static_cast<double>(rng() % 5) / 10.0;
  auto build = [&](std::vector<std::size_t> order) {
    TranslationTable table;
    for (std::size_t i : order) table.set(cells[i].first, cells[i].second, probs[i]);
    return table;
  };
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  const TranslationTable forward = build(order);
  std::shuffle(order.begin(), order.end(), rng);
  const TranslationTable shuffled = build(order);
  const Corpus corpus = testing::RandomCorpus(50, 6, 7, 8);
  for (const auto& pair : corpus) {
    for (bool use_null : {false, true}) {
      CHECK(ViterbiAlign(pair, forward, use_null) == ViterbiAlign(pair, shuffled, use_null));
    }
  }
}

TEST_CASE("model 1 viterbi matches exhaustive search on short sentences") {
  const Corpus corpus = testing::RandomCorpus(200, 5, 5, 31);
  const TranslationTable table = TrainModel1(corpus, Config(5, 0.05));
  for (const auto& pair : corpus) {
    for (bool use_null : {false, true}) {
      const Alignment expected = oracle::ExhaustiveViterbi(
          pair.source.size(), pair.target.size(), use_null,
          [&](std::size_t s, std::size_t t) {
            const std::string src = s == 0 ? std::string(kNullWord) : pair.source[s - 1];
            return table.lookup(src, pair.target[t - 1]);
          });
      CHECK(ViterbiAlign(pair, table, use_null) == expected);
    }
  }
}

TEST_CASE("monotone lexicon corpus: viterbi recovers the identity") {
  const Corpus corpus = testing::MonotoneLexiconCorpus(1000, 50, 1, 8, 12);
  const TranslationTable table = TrainModel1(corpus, EmConfig{});
  for (const auto& pair : corpus) {
    Alignment identity;
    for (std::size_t i = 1; i <= pair.source.size(); ++i) identity.insert({i, i});
    CHECK(ViterbiAlign(pair, table, true) == identity);
  }
}

double Model2Weight(const SentencePair& pair, const Model2Params& params,
                    std::size_t s, std::size_t t) {
  const double m = static_cast<double>(pair.source.size());
  const double n = static_cast<double>(pair.target.size());
  const std::string& y = pair.target[t - 1];
  if (s == 0) return params.null_weight * params.table.lookup(kNullWord, y);
  double z = 0.0;
  for (std::size_t i = 1; i <= pair.source.size(); ++i) {
    z += std::exp(-params.tension * std::abs(i / m - t / n));
  }
  return (1.0 - params.null_weight) * std::exp(-params.tension * std::abs(s / m - t / n)) /
         z * params.table.lookup(pair.source[s - 1], y);
}

TEST_CASE("diagonal model 2 on a monotone corpus") {
  const Corpus corpus = testing::MonotoneLexiconCorpus(400, 30, 1, 5, 44, false);
  DiagonalConfig diag;
  TrainingTrace trace;
  const Model2Params params = TrainModel2Diag(corpus, EmConfig{}, diag, &trace);
  CHECK(params.tension > diag.initial_tension);
  CHECK(trace.tension.size() == 5);
  CHECK(params.table.max_row_error() <= 1e-9);

  // The likelihood rises with tension around the starting point under the
  // table the training produced.
  auto t = [&](const std::string& f, const std::string& e) {
    return params.table.lookup(f.empty() ? std::string(kNullWord) : f, e);
  };
  const double eps = 1e-4;
  const double up = oracle::DiagonalLogLikelihood(corpus, diag.initial_tension + eps, 0.05, t);
  const double down = oracle::DiagonalLogLikelihood(corpus, diag.initial_tension - eps, 0.05, t);
  CHECK(up > down);

  for (const auto& pair : corpus) {
    Alignment identity;
    for (std::size_t i = 1; i <= pair.source.size(); ++i) identity.insert({i, i});
    const Alignment got = ViterbiAlign(pair, params);
    CHECK(got == identity);
    CHECK(got == oracle::ExhaustiveViterbi(
                     pair.source.size(), pair.target.size(), true,
                     [&](std::size_t s, std::size_t tt) { return Model2Weight(pair, params, s, tt); }));
  }
}

TEST_CASE("model 2 viterbi matches exhaustive search on random data") {
  const Corpus corpus = testing::RandomCorpus(150, 6, 5, 77);
  const Model2Params params = TrainModel2Diag(corpus, Config(4, 0.05));
  for (const auto& pair : corpus) {
    CHECK(ViterbiAlign(pair, params) ==
          oracle::ExhaustiveViterbi(pair.source.size(), pair.target.size(), true,
                                    [&](std::size_t s, std::size_t t) {
                                      return Model2Weight(pair, params, s, t);
                                    }));
  }
}

TEST_CASE("zero tension reduces model 2 to model 1") {
  const Corpus corpus = testing::RandomCorpus(80, 10, 7, 13);
  DiagonalConfig flat;
  flat.initial_tension = 0.0;
  flat.optimize_tension = false;
  const Model2Params m2 = TrainModel2Diag(corpus, Config(5, 0.05), flat);
  const TranslationTable m1 = TrainModel1(corpus, Config(5, 0.05));
  CheckTablesClose(m1, m2.table, 1e-12);
}

TEST_CASE("tension is clamped to its bounds") {
  const Corpus corpus = testing::MonotoneLexiconCorpus(200, 20, 2, 6, 3);
  DiagonalConfig diag;
  diag.tension_step_size = 1000.0;
  const Model2Params params = TrainModel2Diag(corpus, EmConfig{}, diag);
  CHECK(params.tension >= diag.min_tension);
  CHECK(params.tension <= diag.max_tension);
}

TEST_CASE("model 2 params restore from table notes") {
  const Corpus corpus = testing::MonotoneLexiconCorpus(50, 10, 2, 5, 6);
  const Model2Params params = TrainModel2Diag(corpus, EmConfig{});
  const Model2Params back = Model2FromTable(params.table);
  CHECK(back.tension == params.tension);
  CHECK(back.null_weight == params.null_weight);
  TranslationTable plain;
  plain.set("a", "A", 1.0);
  CHECK_THROWS_AS(Model2FromTable(plain), DataError);
}

TEST_CASE("literal NULL token in the source is rejected") {
  const Corpus corpus{{1, {std::string(kNullWord)}, {"X"}}};
  CHECK_THROWS_AS(TrainModel1(corpus, EmConfig{}), DataError);
}

TEST_CASE("align corpus equals per-pair viterbi") {
  const Corpus corpus = testing::RandomCorpus(100, 10, 8, 2);
  const TranslationTable table = TrainModel1(corpus, EmConfig{});
  const auto all = AlignCorpus(corpus, table, true);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(all[i] == ViterbiAlign(corpus[i], table, true));
  }
}

}  // namespace
}  // namespace refsmith
