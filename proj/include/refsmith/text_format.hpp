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

#ifndef REFSMITH_TEXT_FORMAT_HPP_
#define REFSMITH_TEXT_FORMAT_HPP_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace refsmith {

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

// Strict full-string parses; return false on trailing garbage or overflow.
bool ParseDouble(std::string_view text, double* value);
bool ParseSize(std::string_view text, std::size_t* value);

std::ifstream OpenForRead(const std::filesystem::path& path);
std::ofstream OpenForWrite(const std::filesystem::path& path);

// Flushes and closes, raising IoError if any write failed.
void FinishWrite(std::ofstream& out, const std::filesystem::path& path);

}  // namespace refsmith

#endif  // REFSMITH_TEXT_FORMAT_HPP_
