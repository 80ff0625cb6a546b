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

#include "refsmith/external_model.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <regex>

#include "json.hpp"
#include "refsmith/error.hpp"

extern char** environ;

namespace refsmith {

namespace {

using Kind = ProtocolError::Kind;
using ordered_json = nlohmann::ordered_json;

void IgnoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

bool HasSpace(std::string_view token) {
  return token.find_first_of(" \t\r\n\f\v") != std::string_view::npos;
}

// Shared line framing over a pair of file descriptors.
class FdChannel : public LineChannel {
 public:
  void WriteLine(std::string_view line) override {
    std::string data(line);
    data += '\n';
    std::size_t written = 0;
    while (written < data.size()) {
      const ssize_t n = ::write(write_fd_, data.data() + written, data.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(Kind::kClosed,
                            std::string("write failed: ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(n);
    }
  }

  std::string ReadLine(std::chrono::milliseconds timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const std::size_t newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        std::string line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        throw ProtocolError(Kind::kTimeout,
                            "no response within " + std::to_string(timeout.count()) +
                                " ms",
                            buffer_);
      }
      pollfd pfd{read_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(Kind::kClosed,
                            std::string("poll failed: ") + std::strerror(errno), buffer_);
      }
      if (ready == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(Kind::kClosed,
                            std::string("read failed: ") + std::strerror(errno), buffer_);
      }
      if (n == 0) {
        throw ProtocolError(Kind::kClosed, "model closed the stream mid-record",
                            buffer_);
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 protected:
  int read_fd_ = -1;
  int write_fd_ = -1;

 private:
  std::string buffer_;
};

class ProcessChannel : public FdChannel {
 public:
  explicit ProcessChannel(const std::string& command) {
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      throw ProtocolError(Kind::kSpawn, std::string("pipe: ") + std::strerror(errno));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ProtocolError(Kind::kSpawn, std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, &attr,
                                 const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    if (rc != 0) {
      pid_ = -1;
      Close();
      throw ProtocolError(Kind::kSpawn,
                          "cannot spawn '" + command + "': " + std::strerror(rc));
    }
  }

  ~ProcessChannel() override { Close(); }

 private:
  void Close() {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    write_fd_ = read_fd_ = -1;
    if (pid_ > 0) {
      ::kill(-pid_, SIGKILL);
      int status = 0;
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
};

class TcpChannel : public FdChannel {
 public:
  TcpChannel(const std::string& host, const std::string& port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found);
    if (rc != 0) {
      throw ProtocolError(Kind::kSpawn, "cannot resolve " + host + ":" + port +
                                            ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    int last_errno = 0;
    for (addrinfo* ai = found; ai; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) {
        last_errno = errno;
        continue;
      }
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      last_errno = errno;
      ::close(fd);
      fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) {
      throw ProtocolError(Kind::kSpawn, "cannot connect to " + host + ":" + port +
                                            ": " + std::strerror(last_errno));
    }
    read_fd_ = write_fd_ = fd;
  }

  ~TcpChannel() override {
    if (read_fd_ >= 0) ::close(read_fd_);
  }
};

}  // namespace

std::string EncodeRequest(const ModelQuery& query) {
  ordered_json j;
  j["v"] = 1;
  j["source_prefix"] = std::vector<std::string>(query.source_prefix.begin(),
                                                query.source_prefix.end());
  j["target_prefix"] = std::vector<std::string>(query.target_prefix.begin(),
                                                query.target_prefix.end());
  j["n_best"] = query.n_best;
  return j.dump();
}

std::string EncodeResponse(const ModelResponse& response) {
  ordered_json candidates = ordered_json::array();
  for (const Candidate& c : response.candidates) {
    ordered_json item;
    item["token"] = c.end ? std::string(kEndToken) : c.token;
    item["logprob"] = c.logprob;
    candidates.push_back(std::move(item));
  }
  ordered_json j;
  j["v"] = 1;
  j["candidates"] = std::move(candidates);
  return j.dump();
}

ModelResponse DecodeResponse(std::string_view line) {
  const std::string raw(line);
  const auto malformed = [&](const std::string& why) {
    return ProtocolError(Kind::kMalformed, why, raw);
  };
  const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw malformed("response is not valid JSON");
  if (!j.is_object()) throw malformed("response is not a JSON object");
  const auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer() || v->get<long long>() != 1) {
    throw malformed("response lacks \"v\":1");
  }
  const auto list = j.find("candidates");
  if (list == j.end() || !list->is_array()) {
    throw malformed("response lacks a \"candidates\" array");
  }
  ModelResponse response;
  for (const auto& item : *list) {
    if (!item.is_object()) throw malformed("candidate is not an object");
    const auto token = item.find("token");
    const auto logprob = item.find("logprob");
    if (token == item.end() || !token->is_string()) {
      throw malformed("candidate lacks a string \"token\"");
    }
    if (logprob == item.end() || !logprob->is_number()) {
      throw malformed("candidate lacks a numeric \"logprob\"");
    }
    const std::string word = token->get<std::string>();
    const double lp = logprob->get<double>();
    if (word == kEndToken) {
      response.candidates.push_back(Candidate::End(lp));
    } else {
      if (HasSpace(word)) {
        throw ProtocolError(Kind::kInvariant, "candidate token contains whitespace",
                            raw);
      }
      response.candidates.push_back({word, lp, false});
    }
  }
  ValidateResponse(response, raw);
  return response;
}

Endpoint Endpoint::Parse(std::string_view spec) {
  static const std::regex kHostPort(R"(^([A-Za-z0-9._\-]+|\[[0-9A-Fa-f:.]+\]):([0-9]{1,5})$)");
  Endpoint endpoint;
  const std::string text(spec);
  std::smatch match;
  if (std::regex_match(text, match, kHostPort)) {
    endpoint.kind = Kind::kTcp;
    endpoint.host = match[1].str();
    if (endpoint.host.front() == '[') {
      endpoint.host = endpoint.host.substr(1, endpoint.host.size() - 2);
    }
    endpoint.port = match[2].str();
  } else {
    if (text.empty()) throw UsageError("empty external model command");
    endpoint.command = text;
  }
  return endpoint;
}

std::string Endpoint::Describe() const {
  return kind == Kind::kTcp ? "tcp:" + host + ":" + port : "process:" + command;
}

std::unique_ptr<LineChannel> OpenChannel(const Endpoint& endpoint) {
  IgnoreSigpipe();
  if (endpoint.kind == Endpoint::Kind::kTcp) {
    return std::make_unique<TcpChannel>(endpoint.host, endpoint.port);
  }
  return std::make_unique<ProcessChannel>(endpoint.command);
}

ExternalModel::ExternalModel(Endpoint endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

void ExternalModel::Connect() {
  if (!channel_) channel_ = OpenChannel(endpoint_);
}

ModelResponse ExternalModel::Query(const ModelQuery& query) {
  Connect();
  try {
    channel_->WriteLine(EncodeRequest(query));
    const std::string line = channel_->ReadLine(timeout_);
    return DecodeResponse(line);
  } catch (const ProtocolError&) {
    channel_.reset();
    throw;
  }
}

void ExternalModel::CheckReachable() {
  Connect();
  static const std::vector<Token> kProbe = {"<probe>"};
  try {
    channel_->WriteLine(EncodeRequest({kProbe, {}, 1}));
    // Any reply line proves the model is alive; its content is not checked.
    channel_->ReadLine(timeout_);
  } catch (const ProtocolError&) {
    channel_.reset();
    throw;
  }
}

std::string ExternalModel::Identity() const {
  return "external " + endpoint_.Describe();
}

}  // namespace refsmith
