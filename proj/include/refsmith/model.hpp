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

#ifndef REFSMITH_MODEL_HPP_
#define REFSMITH_MODEL_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "refsmith/corpus.hpp"
#include "refsmith/translation_table.hpp"

namespace refsmith {

// Wire spelling of the end-of-sentence candidate.
inline constexpr std::string_view kEndToken = "</s>";

// Ask for the top n_best continuations of target_prefix given only the
// observed source prefix.
struct ModelQuery {
  std::span<const Token> source_prefix;
  std::span<const Token> target_prefix;
  std::size_t n_best = 1;
};

struct Candidate {
  Token token;  // empty when end is set
  double logprob = 0.0;
  bool end = false;

  static Candidate End(double logprob) { return {Token{}, logprob, true}; }
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct ModelResponse {
  std::vector<Candidate> candidates;  // descending logprob
};

// Throws ProtocolError(kInvariant) unless the response is non-empty, sorted by
// descending finite logprob <= 0, has no empty tokens and at most one END.
// raw is attached to the error as the offending record.
void ValidateResponse(const ModelResponse& response, std::string_view raw = {});

// Conditional next-word distribution p(y_t | x_<=g(t), y_<t).
class TranslationModel {
 public:
  virtual ~TranslationModel() = default;
  virtual ModelResponse Query(const ModelQuery& query) = 0;
  // Throws ProtocolError when the model cannot be reached at all.
  virtual void CheckReachable() {}
  // Human-readable model description recorded in run manifests.
  virtual std::string Identity() const = 0;
};

// Makes one model instance per decoding worker.
using ModelFactory = std::function<std::unique_ptr<TranslationModel>()>;

// Desk-scale stand-in for a full-sentence model. Target step t reads the
// lexical row of source position min(t, |prefix|); once t runs past the
// prefix, END takes most of the mass and the last word's row shares the rest,
// scaled down by exp(-end_bias). A source word missing from the table is
// copied through with probability 1.
//
// Copies share the immutable table, so one instance per worker is cheap.
class LexicalModel : public TranslationModel {
 public:
  explicit LexicalModel(const TranslationTable& table, double end_bias = 10.0);

  ModelResponse Query(const ModelQuery& query) override;
  ModelResponse Answer(const ModelQuery& query) const;
  std::string Identity() const override;

  double end_bias() const { return end_bias_; }

 private:
  struct Scored {
    Token token;
    double logprob;
  };
  using Rows = std::unordered_map<std::string, std::vector<Scored>>;

  std::shared_ptr<const Rows> rows_;
  double end_bias_;
  std::size_t entries_ = 0;
};

}  // namespace refsmith

#endif  // REFSMITH_MODEL_HPP_
