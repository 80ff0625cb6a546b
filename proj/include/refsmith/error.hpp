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

#ifndef REFSMITH_ERROR_HPP_
#define REFSMITH_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace refsmith {

// Base of every error the library raises. The CLI maps the subclasses onto
// exit codes: DataError -> 1, IoError/UsageError -> 2, ProtocolError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (bad corpus line, bad link, bad table).
class DataError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Bad configuration or parameter combination.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Failure talking to an external translation model.
class ProtocolError : public Error {
 public:
  enum class Kind { kTimeout, kMalformed, kInvariant, kClosed, kSpawn };

  ProtocolError(Kind kind, const std::string& what, std::string raw = {})
      : Error(std::string(KindName(kind)) + ": " + what),
        kind_(kind),
        raw_(std::move(raw)) {}

  Kind kind() const { return kind_; }
  // The offending record as received, when there was one.
  const std::string& raw() const { return raw_; }

  static const char* KindName(Kind kind) {
    switch (kind) {
      case Kind::kTimeout: return "timeout";
      case Kind::kMalformed: return "malformed record";
      case Kind::kInvariant: return "invariant violation";
      case Kind::kClosed: return "stream closed";
      case Kind::kSpawn: return "connection failed";
    }
    return "protocol error";
  }

 private:
  Kind kind_;
  std::string raw_;
};

// Decoding of one sentence failed. Carries the pair id and target step so the
// run manifest can say where.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t step, bool protocol,
              std::string raw = {})
      : Error(what), step_(step), protocol_(protocol), raw_(std::move(raw)) {}

  std::size_t step() const { return step_; }
  // True when the underlying cause was a model protocol failure.
  bool protocol() const { return protocol_; }
  const std::string& raw() const { return raw_; }

 private:
  std::size_t step_;
  bool protocol_;
  std::string raw_;
};

}  // namespace refsmith

#endif  // REFSMITH_ERROR_HPP_
