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

// Reference external model for the refsmith-model v1 protocol.
//
// It translates by copying: step t answers x_t while t <= |source_prefix| and
// END afterwards, so a full decode reproduces the source. Fault injection
// flags make it misbehave on purpose for protocol tests.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "refsmith/external_model.hpp"

namespace {

struct Faults {
  std::size_t malformed_every = 0;
  std::size_t unsorted_every = 0;
  std::size_t exit_after = 0;
  int delay_ms = 0;
};

// Answer for one request line; empty optional-like "" means: stop serving.
std::string Respond(const std::string& line, std::size_t n, const Faults& faults,
                    bool* stop) {
  using refsmith::Candidate;
  using refsmith::ModelResponse;
  if (faults.exit_after && n > faults.exit_after) {
    *stop = true;
    return R"({"v":1,"candid)";
  }
  if (faults.delay_ms) {
    std::this_thread::sleep_for(std::chrono::milliseconds(faults.delay_ms));
  }
  if (faults.malformed_every && n % faults.malformed_every == 0) {
    return "this is not a json record";
  }
  const nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
  ModelResponse response;
  if (request.is_discarded() || !request.is_object()) {
    response.candidates.push_back(Candidate::End(0.0));
    return refsmith::EncodeResponse(response);
  }
  const auto source = request.value("source_prefix", std::vector<std::string>{});
  const auto target = request.value("target_prefix", std::vector<std::string>{});
  const std::size_t t = target.size() + 1;
  if (t <= source.size()) {
    response.candidates.push_back({source[t - 1], 0.0, false});
  } else {
    response.candidates.push_back(Candidate::End(0.0));
  }
  if (faults.unsorted_every && n % faults.unsorted_every == 0) {
    response.candidates.push_back({"zzz", -2.0, false});
    response.candidates.push_back({"yyy", -1.0, false});
  }
  return refsmith::EncodeResponse(response);
}

void ServeStream(std::FILE* in, std::FILE* out, const Faults& faults) {
  std::string line;
  std::size_t n = 0;
  int c;
  while ((c = std::fgetc(in)) != EOF) {
    if (c != '\n') {
      line.push_back(static_cast<char>(c));
      continue;
    }
    bool stop = false;
    const std::string reply = Respond(line, ++n, faults, &stop);
    std::fputs(reply.c_str(), out);
    if (!stop) std::fputc('\n', out);
    std::fflush(out);
    line.clear();
    if (stop) return;
  }
}

int Listen(int port, const Faults& faults) {
  const int server = ::socket(AF_INET, SOCK_STREAM, 0);
  if (server < 0) return 1;
  int yes = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(server, 16) != 0) {
    std::perror("refsmith-model-stub");
    return 1;
  }
  socklen_t len = sizeof(addr);
  ::getsockname(server, reinterpret_cast<sockaddr*>(&addr), &len);
  std::printf("listening %d\n", ntohs(addr.sin_port));
  std::fflush(stdout);
  for (;;) {
    const int client = ::accept(server, nullptr, nullptr);
    if (client < 0) continue;
    std::thread([client, faults] {
      std::FILE* in = ::fdopen(client, "r");
      std::FILE* out = ::fdopen(::dup(client), "w");
      ServeStream(in, out, faults);
      std::fclose(out);
      std::fclose(in);
    }).detach();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copying reference model speaking refsmith-model v1"};
  Faults faults;
  int listen_port = -1;
  app.add_option("--malformed-every", faults.malformed_every,
                 "Answer every Nth request with a non-JSON line");
  app.add_option("--unsorted-every", faults.unsorted_every,
                 "Answer every Nth request with unsorted candidates");
  app.add_option("--exit-after", faults.exit_after,
                 "After N answers, send half a record and exit");
  app.add_option("--delay-ms", faults.delay_ms, "Sleep before every answer");
  app.add_option("--listen", listen_port,
                 "Serve TCP on 127.0.0.1:PORT (0 picks a port) instead of stdio");
  CLI11_PARSE(app, argc, argv);

  if (listen_port >= 0) return Listen(listen_port, faults);
  ServeStream(stdin, stdout, faults);
  return 0;
}
