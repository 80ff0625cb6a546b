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

#ifndef REFSMITH_TRANSLATION_TABLE_HPP_
#define REFSMITH_TRANSLATION_TABLE_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace refsmith {

// Source-side key of the empty word. Serialized literally.
inline constexpr std::string_view kNullWord = "<NULL>";

inline constexpr std::string_view kTableHeader = "refsmith-ttable v1";

// Lexical translation probabilities t(target | source). Every source row is a
// distribution over the target words it co-occurred with.
class TranslationTable {
 public:
  struct Entry {
    std::string target;
    double prob = 0.0;
  };

  // Raw stored probability; 0 when the pair is absent.
  double prob(std::string_view source, std::string_view target) const;

  // Probability used at alignment time: the stored value, or the floor for a
  // pair the table has never seen.
  double lookup(std::string_view source, std::string_view target) const;

  void set(std::string_view source, std::string_view target, double prob);

  bool contains(std::string_view source, std::string_view target) const;
  bool has_source(std::string_view source) const;

  // Entries of one row ordered by descending probability, then target word.
  std::vector<Entry> sorted_row(std::string_view source) const;

  // Source words in byte order.
  std::vector<std::string> sources() const;

  std::size_t source_count() const { return rows_.size(); }
  std::size_t entry_count() const;
  bool empty() const { return rows_.empty(); }

  double floor() const { return floor_; }
  void set_floor(double floor) { floor_ = floor; }

  // Free-form key/value notes written as "# key value" header comments.
  const std::map<std::string, std::string>& notes() const { return notes_; }
  void set_note(const std::string& key, const std::string& value) {
    notes_[key] = value;
  }

  // Largest |sum(row) - 1| over all rows.
  double max_row_error() const;

  // Throws DataError naming the first row whose sum is off by more than
  // tolerance, or that holds a probability outside [0, 1].
  void Validate(double tolerance = 1e-9) const;

 private:
  using Row = std::unordered_map<std::string, double>;
  const Row* find_row(std::string_view source) const;

  std::unordered_map<std::string, Row> rows_;
  double floor_ = 0.0;
  std::map<std::string, std::string> notes_;
};

// Header line, "# key value" notes, then "source<TAB>target<TAB>prob" lines
// sorted by source word and descending probability.
void SaveTable(const TranslationTable& table, const std::filesystem::path& path);
TranslationTable LoadTable(const std::filesystem::path& path);

}  // namespace refsmith

#endif  // REFSMITH_TRANSLATION_TABLE_HPP_
