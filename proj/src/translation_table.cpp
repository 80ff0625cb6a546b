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

#include "refsmith/translation_table.hpp"

#include <algorithm>
#include <cmath>

#include "refsmith/error.hpp"
#include "refsmith/text_format.hpp"

namespace refsmith {

const TranslationTable::Row* TranslationTable::find_row(
    std::string_view source) const {
  const auto it = rows_.find(std::string(source));
  return it == rows_.end() ? nullptr : &it->second;
}

double TranslationTable::prob(std::string_view source,
                              std::string_view target) const {
  const Row* row = find_row(source);
  if (!row) return 0.0;
  const auto it = row->find(std::string(target));
  return it == row->end() ? 0.0 : it->second;
}

double TranslationTable::lookup(std::string_view source,
                                std::string_view target) const {
  const Row* row = find_row(source);
  if (!row) return floor_;
  const auto it = row->find(std::string(target));
  return it == row->end() ? floor_ : it->second;
}

void TranslationTable::set(std::string_view source, std::string_view target,
                           double prob) {
  rows_[std::string(source)][std::string(target)] = prob;
}

bool TranslationTable::contains(std::string_view source,
                                std::string_view target) const {
  const Row* row = find_row(source);
  return row && row->count(std::string(target)) > 0;
}

bool TranslationTable::has_source(std::string_view source) const {
  return find_row(source) != nullptr;
}

std::vector<TranslationTable::Entry> TranslationTable::sorted_row(
    std::string_view source) const {
  std::vector<Entry> entries;
  if (const Row* row = find_row(source)) {
    entries.reserve(row->size());
    for (const auto& [target, p] : *row) entries.push_back({target, p});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.target < b.target;
  });
  return entries;
}

std::vector<std::string> TranslationTable::sources() const {
  std::vector<std::string> keys;
  keys.reserve(rows_.size());
  for (const auto& [source, row] : rows_) keys.push_back(source);
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::size_t TranslationTable::entry_count() const {
  std::size_t n = 0;
  for (const auto& [source, row] : rows_) n += row.size();
  return n;
}

double TranslationTable::max_row_error() const {
  double worst = 0.0;
  for (const auto& [source, row] : rows_) {
    double sum = 0.0;
    for (const auto& [target, p] : row) sum += p;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

void TranslationTable::Validate(double tolerance) const {
  for (const std::string& source : sources()) {
    const Row& row = rows_.at(source);
    double sum = 0.0;
    for (const auto& [target, p] : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw DataError("row '" + source + "': probability of '" + target +
                        "' outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw DataError("row '" + source + "' is not normalized (sums to " +
                      FormatDouble(sum) + ")");
    }
  }
}

void SaveTable(const TranslationTable& table, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  out << kTableHeader << '\n';
  for (const auto& [key, value] : table.notes()) {
    out << "# " << key << ' ' << value << '\n';
  }
  out << "# floor " << FormatDouble(table.floor()) << '\n';
  for (const std::string& source : table.sources()) {
    for (const auto& entry : table.sorted_row(source)) {
      out << source << '\t' << entry.target << '\t' << FormatDouble(entry.prob)
          << '\n';
    }
  }
  FinishWrite(out, path);
}

TranslationTable LoadTable(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  std::string line;
  const std::string where = path.string() + ":";
  if (!std::getline(in, line)) throw DataError(where + "1: empty table file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTableHeader) {
    if (line.rfind("refsmith-ttable ", 0) == 0) {
      throw DataError(where + "1: unsupported table version '" + line.substr(16) +
                      "', expected v1");
    }
    throw DataError(where + "1: missing '" + std::string(kTableHeader) +
                    "' header");
  }
  TranslationTable table;
  std::size_t line_no = 1;
  std::size_t entries = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string at = where + std::to_string(line_no) + ": ";
    if (line[0] == '#') {
      const std::size_t start = line.find_first_not_of("# ");
      const std::string body = start == std::string::npos ? "" : line.substr(start);
      const std::size_t space = body.find(' ');
      const std::string key = body.substr(0, space);
      const std::string value = space == std::string::npos ? "" : body.substr(space + 1);
      if (key == "floor") {
        double floor = 0.0;
        if (!ParseDouble(value, &floor) || floor < 0.0 || floor > 1.0) {
          throw DataError(at + "bad floor value '" + value + "'");
        }
        table.set_floor(floor);
      } else if (!key.empty()) {
        table.set_note(key, value);
      }
      continue;
    }
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos) {
      throw DataError(at + "expected 3 tab-separated fields");
    }
    const std::string source = line.substr(0, tab1);
    const std::string target = line.substr(tab1 + 1, tab2 - tab1 - 1);
    double p = 0.0;
    if (source.empty() || target.empty()) throw DataError(at + "empty word");
    if (!ParseDouble(std::string_view(line).substr(tab2 + 1), &p) || p < 0.0 ||
        p > 1.0) {
      throw DataError(at + "probability must be a number in [0,1]");
    }
    if (table.contains(source, target)) {
      throw DataError(at + "duplicate entry " + source + " -> " + target);
    }
    table.set(source, target, p);
    ++entries;
  }
  if (in.bad()) throw IoError(path.string(), "read failed");
  if (entries == 0) throw DataError(where + " table has no entries");
  try {
    table.Validate();
  } catch (const DataError& e) {
    throw DataError(where + " " + e.what());
  }
  return table;
}

}  // namespace refsmith
