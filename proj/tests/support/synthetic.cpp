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


#include "synthetic.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace refsmith::testing {

namespace {

std::string Lower(const std::string& word) {
  std::string out = word;
  out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

}  // namespace

Corpus MonotoneLexiconCorpus(std::size_t pairs, std::size_t vocab,
                             std::size_t min_len, std::size_t max_len,
                             std::uint32_t seed, bool distinct_words) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> length(min_len, max_len);
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  std::vector<std::size_t> ids(vocab);
  std::iota(ids.begin(), ids.end(), 0);
  Corpus corpus;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t n = length(rng);
    std::vector<std::size_t> chosen;
    if (distinct_words) {
      std::shuffle(ids.begin(), ids.end(), rng);
      chosen.assign(ids.begin(), ids.begin() + n);
    } else {
      for (std::size_t j = 0; j < n; ++j) chosen.push_back(word(rng));
    }
    SentencePair pair;
    pair.id = i + 1;
    for (std::size_t w : chosen) {
      pair.source.push_back("s" + std::to_string(w));
      pair.target.push_back("T" + std::to_string(w));
    }
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

Corpus RandomCorpus(std::size_t pairs, std::size_t vocab, std::size_t max_len,
                    std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> length(1, max_len);
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  Corpus corpus;
  for (std::size_t i = 0; i < pairs; ++i) {
    SentencePair pair;
    pair.id = i + 1;
    for (std::size_t j = length(rng); j > 0; --j) {
      pair.source.push_back("f" + std::to_string(word(rng)));
    }
    for (std::size_t j = length(rng); j > 0; --j) {
      pair.target.push_back("e" + std::to_string(word(rng)));
    }
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

Alignment RandomAlignment(std::size_t source_length, std::size_t target_length,
                          double p, std::mt19937& rng) {
  std::bernoulli_distribution link(p);
  Alignment a;
  for (std::size_t s = 1; s <= source_length; ++s) {
    for (std::size_t t = 1; t <= target_length; ++t) {
      if (link(rng)) a.insert({s, t});
    }
  }
  return a;
}

TranslationTable IdentityTable(std::size_t vocab, double noise) {
  TranslationTable table;
  for (std::size_t i = 0; i < vocab; ++i) {
    const std::string source = "s" + std::to_string(i);
    if (noise > 0.0) {
      table.set(source, "T" + std::to_string(i), 1.0 - noise);
      table.set(source, "T" + std::to_string((i + 1) % vocab), noise);
    } else {
      table.set(source, "T" + std::to_string(i), 1.0);
    }
  }
  table.set_floor(1e-6);
  return table;
}

VerbWorld MakeVerbWorld(std::size_t pairs, std::size_t max_objects,
                        double paraphrase_rate, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> subject(0, 19), object(0, 49), verb(0, 9);
  std::uniform_int_distribution<std::size_t> objects(0, max_objects);
  std::bernoulli_distribution paraphrase(paraphrase_rate);
  VerbWorld world;
  for (std::size_t i = 0; i < pairs; ++i) {
    SentencePair pair;
    pair.id = i + 1;
    const std::string s = "S" + std::to_string(subject(rng));
    const std::string v = "V" + std::to_string(verb(rng));
    pair.source.push_back(s);
    pair.target.push_back(Lower(s));
    pair.target.push_back(Lower(v));
    for (std::size_t j = objects(rng); j > 0; --j) {
      const std::string o = "O" + std::to_string(object(rng));
      pair.source.push_back(o);
      pair.target.push_back(paraphrase(rng) ? Lower(o) + "b" : Lower(o));
    }
    pair.source.push_back(v);
    world.max_source_length = std::max(world.max_source_length, pair.source.size());
    world.corpus.push_back(std::move(pair));
  }
  return world;
}

ModelResponse FixtureVerbModel::Query(const ModelQuery& query) {
  const auto& prefix = query.source_prefix;
  const std::size_t m = prefix.size();
  const std::size_t t = query.target_prefix.size() + 1;
  ModelResponse response;
  if (t == 1) {
    response.candidates.push_back({Lower(prefix[0]), 0.0, false});
  } else if (t == 2) {
    if (prefix[m - 1][0] == 'V') {
      response.candidates.push_back({Lower(prefix[m - 1]), 0.0, false});
    } else {
      // Verb not read yet: anticipate from a fixed prior.
      const double prior[] = {0.4, 0.3, 0.2, 0.1};
      for (int v = 0; v < 4; ++v) {
        response.candidates.push_back(
            {"v" + std::to_string(v), std::log(prior[v]), false});
      }
    }
  } else if (t - 2 < m && prefix[t - 2][0] == 'O') {
    response.candidates.push_back({Lower(prefix[t - 2]), 0.0, false});
  } else {
    response.candidates.push_back(Candidate::End(0.0));
  }
  if (response.candidates.size() > query.n_best) {
    response.candidates.resize(query.n_best);
  }
  return response;
}

ModelResponse CausalityProbe::Query(const ModelQuery& query) {
  ++queries;
  const std::size_t t = query.target_prefix.size() + 1;
  const std::size_t allowed =
      k_ >= source_length_ ? source_length_ : std::min(t + k_ - 1, source_length_);
  if (query.source_prefix.size() > allowed) ++violations;
  if (query.source_prefix.size() < last_prefix && t > 1) prefix_shrank = true;
  last_prefix = query.source_prefix.size();
  return inner_.Query(query);
}

TempDir::TempDir() {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / "refsmith-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunCommand(const std::string& command_line) {
  const int status = std::system(command_line.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string Quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace refsmith::testing
