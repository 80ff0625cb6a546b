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

#include "refsmith/corpus.hpp"

#include <algorithm>
#include <string>

#include "refsmith/error.hpp"
#include "refsmith/text_format.hpp"

namespace refsmith {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string Where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

Alignment::Alignment(std::initializer_list<Link> links)
    : Alignment(std::vector<Link>(links)) {}

Alignment::Alignment(std::vector<Link> links) : links_(std::move(links)) {
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

void Alignment::insert(Link link) {
  const auto it = std::lower_bound(links_.begin(), links_.end(), link);
  if (it == links_.end() || *it != link) links_.insert(it, link);
}

bool Alignment::contains(Link link) const {
  return std::binary_search(links_.begin(), links_.end(), link);
}

Sentence Tokenize(std::string_view line) {
  Sentence tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !IsSpace(line[i])) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string Render(const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (i) out += ' ';
    out += sentence[i];
  }
  return out;
}

std::vector<Sentence> LoadSentences(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  std::vector<Sentence> sentences;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Sentence tokens = Tokenize(line);
    if (tokens.empty()) throw DataError(Where(path, line_no) + ": empty line");
    sentences.push_back(std::move(tokens));
  }
  if (in.bad()) throw IoError(path.string(), "read failed");
  return sentences;
}

void WriteSentences(const std::vector<Sentence>& sentences,
                    const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  for (const Sentence& s : sentences) out << Render(s) << '\n';
  FinishWrite(out, path);
}

Corpus LoadParallelCorpus(const std::filesystem::path& source_path,
                          const std::filesystem::path& target_path) {
  std::vector<Sentence> source = LoadSentences(source_path);
  std::vector<Sentence> target = LoadSentences(target_path);
  if (source.size() != target.size()) {
    throw DataError("line count mismatch: " + source_path.string() + " has " +
                    std::to_string(source.size()) + " lines, " +
                    target_path.string() + " has " +
                    std::to_string(target.size()));
  }
  Corpus corpus(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    corpus[i].id = i + 1;
    corpus[i].source = std::move(source[i]);
    corpus[i].target = std::move(target[i]);
  }
  return corpus;
}

void WriteParallelCorpus(const Corpus& pairs,
                         const std::filesystem::path& source_path,
                         const std::filesystem::path& target_path) {
  std::ofstream src = OpenForWrite(source_path);
  std::ofstream tgt = OpenForWrite(target_path);
  for (const SentencePair& pair : pairs) {
    src << Render(pair.source) << '\n';
    tgt << Render(pair.target) << '\n';
  }
  FinishWrite(src, source_path);
  FinishWrite(tgt, target_path);
}

Alignment ParseAlignmentLine(std::string_view line, std::size_t source_length,
                             std::size_t target_length) {
  std::vector<Link> links;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !IsSpace(line[i])) ++i;
    if (i == start) break;
    const std::string_view item = line.substr(start, i - start);
    const std::size_t dash = item.find('-');
    std::size_t s = 0, t = 0;
    if (dash == std::string_view::npos ||
        !ParseSize(item.substr(0, dash), &s) ||
        !ParseSize(item.substr(dash + 1), &t)) {
      throw DataError("malformed alignment pair '" + std::string(item) +
                      "' at offset " + std::to_string(start));
    }
    if (s >= source_length || t >= target_length) {
      throw DataError("alignment link '" + std::string(item) + "' at offset " +
                      std::to_string(start) + " out of range for lengths " +
                      std::to_string(source_length) + "x" +
                      std::to_string(target_length));
    }
    links.push_back({s + 1, t + 1});
  }
  return Alignment(std::move(links));
}

std::string RenderAlignment(const Alignment& alignment) {
  std::string out;
  for (const Link& link : alignment) {
    if (!out.empty()) out += ' ';
    out += std::to_string(link.source - 1);
    out += '-';
    out += std::to_string(link.target - 1);
  }
  return out;
}

std::vector<Alignment> LoadAlignments(const std::filesystem::path& path,
                                      const Corpus& corpus) {
  std::ifstream in = OpenForRead(path);
  std::vector<Alignment> alignments;
  alignments.reserve(corpus.size());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no > corpus.size()) {
      throw DataError(Where(path, line_no) + ": more alignment lines than " +
                      std::to_string(corpus.size()) + " corpus pairs");
    }
    const SentencePair& pair = corpus[line_no - 1];
    try {
      alignments.push_back(ParseAlignmentLine(line, pair.source.size(),
                                              pair.target.size()));
    } catch (const DataError& e) {
      throw DataError(Where(path, line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError(path.string(), "read failed");
  if (alignments.size() != corpus.size()) {
    throw DataError("line count mismatch: " + path.string() + " has " +
                    std::to_string(alignments.size()) +
                    " alignment lines, corpus has " +
                    std::to_string(corpus.size()) + " pairs");
  }
  return alignments;
}

void WriteAlignments(const std::vector<Alignment>& alignments,
                     const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  for (const Alignment& a : alignments) out << RenderAlignment(a) << '\n';
  FinishWrite(out, path);
}

std::string RenderScoreLine(const ScoredSentence& scored) {
  return std::to_string(scored.pair_id) + '\t' + FormatDouble(scored.bleu) +
         '\t' + Render(scored.pseudo_target);
}

std::vector<ScoredSentence> LoadScoreTable(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  std::vector<ScoredSentence> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw DataError(Where(path, line_no) + ": expected 3 tab-separated fields");
    }
    ScoredSentence row;
    const std::string_view view(line);
    if (!ParseSize(view.substr(0, tab1), &row.pair_id) || row.pair_id == 0) {
      throw DataError(Where(path, line_no) + ": bad pair id");
    }
    if (!ParseDouble(view.substr(tab1 + 1, tab2 - tab1 - 1), &row.bleu) ||
        row.bleu < 0.0 || row.bleu > 100.0) {
      throw DataError(Where(path, line_no) + ": bleu must be a number in [0,100]");
    }
    row.pseudo_target = Tokenize(view.substr(tab2 + 1));
    if (row.pseudo_target.empty()) {
      throw DataError(Where(path, line_no) + ": empty pseudo target");
    }
    table.push_back(std::move(row));
  }
  if (in.bad()) throw IoError(path.string(), "read failed");
  return table;
}

void WriteScoreTable(const std::vector<ScoredSentence>& scored,
                     const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  for (const ScoredSentence& row : scored) out << RenderScoreLine(row) << '\n';
  FinishWrite(out, path);
}

}  // namespace refsmith
