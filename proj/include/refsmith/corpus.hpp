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

#ifndef REFSMITH_CORPUS_HPP_
#define REFSMITH_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace refsmith {

// A token is an opaque, non-empty, whitespace-free UTF-8 string. Subword
// markers (e.g. "@@") are kept as part of the token.
using Token = std::string;

// Tokens of one side of a sentence pair. Positions are 1-indexed in every
// formula; element i-1 holds position i.
using Sentence = std::vector<Token>;

struct SentencePair {
  std::size_t id = 0;  // 1-indexed corpus ordinal
  Sentence source;
  Sentence target;
};

using Corpus = std::vector<SentencePair>;

// One alignment link, both positions 1-indexed.
struct Link {
  std::size_t source = 0;
  std::size_t target = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

// A set of links, kept sorted by (source, target) without duplicates.
class Alignment {
 public:
  Alignment() = default;
  Alignment(std::initializer_list<Link> links);
  explicit Alignment(std::vector<Link> links);

  void insert(Link link);
  bool contains(Link link) const;

  const std::vector<Link>& links() const { return links_; }
  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  auto begin() const { return links_.begin(); }
  auto end() const { return links_.end(); }

  friend bool operator==(const Alignment&, const Alignment&) = default;

 private:
  std::vector<Link> links_;
};

// A generated pseudo-reference with its sentence BLEU against the original.
struct ScoredSentence {
  std::size_t pair_id = 0;
  Sentence pseudo_target;
  double bleu = 0.0;  // in [0, 100]

  friend bool operator==(const ScoredSentence&, const ScoredSentence&) = default;
};

// Splits on runs of whitespace, dropping leading and trailing blanks.
Sentence Tokenize(std::string_view line);

// Joins tokens with single spaces.
std::string Render(const Sentence& sentence);

// Loads a one-sentence-per-line text file. Empty lines are rejected with the
// line number.
std::vector<Sentence> LoadSentences(const std::filesystem::path& path);

void WriteSentences(const std::vector<Sentence>& sentences,
                    const std::filesystem::path& path);

// Loads aligned source/target files into pairs with ids 1..N.
Corpus LoadParallelCorpus(const std::filesystem::path& source_path,
                          const std::filesystem::path& target_path);

void WriteParallelCorpus(const Corpus& pairs,
                         const std::filesystem::path& source_path,
                         const std::filesystem::path& target_path);

// Parses one Pharaoh line ("i-j ..." 0-indexed source-target) into 1-indexed
// links. Any malformed token or out-of-range index fails the whole line.
Alignment ParseAlignmentLine(std::string_view line, std::size_t source_length,
                             std::size_t target_length);

// Inverse of ParseAlignmentLine: sorted, 0-indexed "i-j" pairs.
std::string RenderAlignment(const Alignment& alignment);

// Reads an alignment file, one line per corpus pair.
std::vector<Alignment> LoadAlignments(const std::filesystem::path& path,
                                      const Corpus& corpus);

void WriteAlignments(const std::vector<Alignment>& alignments,
                     const std::filesystem::path& path);

// Score table: "pair_id<TAB>bleu<TAB>tokens" per line.
std::vector<ScoredSentence> LoadScoreTable(const std::filesystem::path& path);
void WriteScoreTable(const std::vector<ScoredSentence>& scored,
                     const std::filesystem::path& path);
std::string RenderScoreLine(const ScoredSentence& scored);

}  // namespace refsmith

#endif  // REFSMITH_CORPUS_HPP_
