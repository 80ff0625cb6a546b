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

#include <cmath>
#include <limits>

#include "refsmith/error.hpp"
#include "refsmith/model.hpp"
#include "refsmith/text_format.hpp"

namespace refsmith {

void ValidateResponse(const ModelResponse& response, std::string_view raw) {
  if (response.candidates.empty()) {
    throw ProtocolError(ProtocolError::Kind::kInvariant, "no candidates",
                          std::string(raw));
  }
  double previous = 0.0;
  bool seen_end = false;
  for (std::size_t i = 0; i < response.candidates.size(); ++i) {
    const Candidate& c = response.candidates[i];
    if (!std::isfinite(c.logprob) || c.logprob > 0.0) {
      throw ProtocolError(ProtocolError::Kind::kInvariant,
                          "candidate " + std::to_string(i) +
                              " has logprob outside (-inf, 0]",
                          std::string(raw));
    }
    if (i > 0 && c.logprob > previous) {
      throw ProtocolError(ProtocolError::Kind::kInvariant,
                          "candidates not sorted by descending logprob at " +
                              std::to_string(i),
                          std::string(raw));
    }
    if (c.end) {
      if (seen_end) {
        throw ProtocolError(ProtocolError::Kind::kInvariant, "END appears twice",
                          std::string(raw));
      }
      seen_end = true;
    } else if (c.token.empty()) {
      throw ProtocolError(ProtocolError::Kind::kInvariant,
                          "candidate " + std::to_string(i) + " has an empty token",
                          std::string(raw));
    }
    previous = c.logprob;
  }
}

LexicalModel::LexicalModel(const TranslationTable& table, double end_bias)
    : end_bias_(end_bias) {
  if (!(end_bias >= 0.0) || !std::isfinite(end_bias)) {
    throw UsageError("end_bias must be a finite non-negative log offset");
  }
  auto rows = std::make_shared<Rows>();
  for (const std::string& source : table.sources()) {
    if (source == kNullWord) continue;
    auto& row = (*rows)[source];
    for (const auto& entry : table.sorted_row(source)) {
      if (entry.prob <= 0.0) continue;
      row.push_back({entry.target, std::log(entry.prob)});
      ++entries_;
    }
  }
  rows_ = std::move(rows);
}

ModelResponse LexicalModel::Query(const ModelQuery& query) { return Answer(query); }

ModelResponse LexicalModel::Answer(const ModelQuery& query) const {
  if (query.source_prefix.empty()) {
    throw UsageError("lexical model query with an empty source prefix");
  }
  const std::size_t t = query.target_prefix.size() + 1;
  const std::size_t m = query.source_prefix.size();
  const bool exhausted = t > m;
  const Token& word = query.source_prefix[std::min(t, m) - 1];

  static const std::vector<Scored> kEmpty;
  const auto it = rows_->find(word);
  const std::vector<Scored>& row =
      it == rows_->end() || it->second.empty() ? kEmpty : it->second;

  ModelResponse response;
  const std::size_t limit = std::max<std::size_t>(query.n_best, 1);
  double offset = 0.0;
  if (exhausted) {
    // END weighs 1 and the row as a whole weighs exp(-end_bias).
    const double log_z = std::log1p(std::exp(-end_bias_));
    response.candidates.push_back(Candidate::End(-log_z));
    offset = -end_bias_ - log_z;
  }
  if (row.empty()) {
    if (response.candidates.size() < limit) {
      response.candidates.push_back({word, offset, false});
    }
  } else {
    for (const Scored& s : row) {
      if (response.candidates.size() >= limit) break;
      response.candidates.push_back({s.token, s.logprob + offset, false});
    }
  }
  return response;
}

std::string LexicalModel::Identity() const {
  return "builtin-lexical entries=" + std::to_string(entries_) +
         " end_bias=" + FormatDouble(end_bias_);
}

}  // namespace refsmith
