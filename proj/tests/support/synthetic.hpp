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


// Synthetic corpora, fixture models and process helpers shared by the tests.

#ifndef REFSMITH_TESTS_SYNTHETIC_HPP_
#define REFSMITH_TESTS_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "refsmith/corpus.hpp"
#include "refsmith/model.hpp"
#include "refsmith/translation_table.hpp"

namespace refsmith::testing {

// Source "s<i>" translates one-to-one to target "T<i>" in the same order, so
// the generating alignment is the identity. With distinct_words no word
// repeats inside a sentence.
Corpus MonotoneLexiconCorpus(std::size_t pairs, std::size_t vocab,
                             std::size_t min_len, std::size_t max_len,
                             std::uint32_t seed, bool distinct_words = true);

// Independent random source and target sentences.
Corpus RandomCorpus(std::size_t pairs, std::size_t vocab, std::size_t max_len,
                    std::uint32_t seed);

// Random alignment over the given lengths, each cell linked with probability p.
Alignment RandomAlignment(std::size_t source_length, std::size_t target_length,
                          double p, std::mt19937& rng);

// t(T<i> | s<i>) = 1 - noise, t(T<i+1> | s<i>) = noise (when noise > 0).
TranslationTable IdentityTable(std::size_t vocab, double noise);

// A verb-final source language translated into verb-second order:
//   source  S  O1 .. On  V      target  s  v  o1 .. on
// so the target verb depends on the last source word. FixtureVerbModel
// translates exactly when the verb is in the observed prefix and guesses
// otherwise; references carry random paraphrases of objects.
struct VerbWorld {
  Corpus corpus;
  std::size_t max_source_length = 0;
};
VerbWorld MakeVerbWorld(std::size_t pairs, std::size_t max_objects,
                        double paraphrase_rate, std::uint32_t seed);

class FixtureVerbModel : public TranslationModel {
 public:
  ModelResponse Query(const ModelQuery& query) override;
  std::string Identity() const override { return "fixture-verb"; }
};

// Records every query and flags any source prefix longer than g(t).
class CausalityProbe : public TranslationModel {
 public:
  CausalityProbe(TranslationModel& inner, std::size_t k, std::size_t source_length)
      : inner_(inner), k_(k), source_length_(source_length) {}

  ModelResponse Query(const ModelQuery& query) override;
  std::string Identity() const override { return "probe"; }

  std::size_t queries = 0;
  std::size_t violations = 0;
  std::size_t last_prefix = 0;
  bool prefix_shrank = false;

 private:
  TranslationModel& inner_;
  std::size_t k_;
  std::size_t source_length_;
};

// Scripted model answering from a lookup on the target prefix.
class ScriptedModel : public TranslationModel {
 public:
  using Script = std::function<ModelResponse(const ModelQuery&)>;
  explicit ScriptedModel(Script script) : script_(std::move(script)) {}
  ModelResponse Query(const ModelQuery& query) override { return script_(query); }
  std::string Identity() const override { return "scripted"; }

 private:
  Script script_;
};

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::filesystem::path& path, const std::string& text);
std::string ReadText(const std::filesystem::path& path);

// Runs a shell command line; returns its exit status (or -1 on signal).
int RunCommand(const std::string& command_line);

std::string Quote(const std::string& s);

}  // namespace refsmith::testing

#endif  // REFSMITH_TESTS_SYNTHETIC_HPP_
