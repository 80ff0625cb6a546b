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

#ifndef REFSMITH_EXTERNAL_MODEL_HPP_
#define REFSMITH_EXTERNAL_MODEL_HPP_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "refsmith/model.hpp"

namespace refsmith {

// "refsmith-model v1": one JSON object per line in each direction.
//   request:  {"v":1,"source_prefix":[...],"target_prefix":[...],"n_best":N}
//   response: {"v":1,"candidates":[{"token":"w","logprob":-0.12},...]}
// "</s>" is END. Unknown fields are ignored.
std::string EncodeRequest(const ModelQuery& query);
std::string EncodeResponse(const ModelResponse& response);

// Throws ProtocolError with the line attached: kMalformed for anything that is
// not a v1 response record, kInvariant when the record breaks response rules.
ModelResponse DecodeResponse(std::string_view line);

// Endpoint of an external model: a shell command to spawn, or host:port.
struct Endpoint {
  enum class Kind { kProcess, kTcp };
  Kind kind = Kind::kProcess;
  std::string command;
  std::string host;
  std::string port;

  // host:port when the spec is exactly <host>:<digits>, a command otherwise.
  static Endpoint Parse(std::string_view spec);
  std::string Describe() const;
};

// A bidirectional line stream with one outstanding request at a time.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void WriteLine(std::string_view line) = 0;
  // Returns the next line without its newline. Throws ProtocolError kTimeout
  // or kClosed (with any partial data as the raw record).
  virtual std::string ReadLine(std::chrono::milliseconds timeout) = 0;
};

// Throws ProtocolError(kSpawn) when the process cannot be started or the
// connection cannot be made.
std::unique_ptr<LineChannel> OpenChannel(const Endpoint& endpoint);

// Talks to one external model over its own channel. Requests are strictly
// serialized. After any protocol failure the channel is dropped and reopened
// on the next query, so a failure only costs the current sentence.
class ExternalModel : public TranslationModel {
 public:
  explicit ExternalModel(Endpoint endpoint,
                         std::chrono::milliseconds timeout = std::chrono::seconds(30));

  // Opens the channel now instead of on first query.
  void Connect();

  ModelResponse Query(const ModelQuery& query) override;
  // Sends a probe request and waits for any reply line.
  void CheckReachable() override;
  std::string Identity() const override;

 private:
  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<LineChannel> channel_;
};

}  // namespace refsmith

#endif  // REFSMITH_EXTERNAL_MODEL_HPP_
