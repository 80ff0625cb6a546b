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

#ifndef REFSMITH_TOOLS_CLI_HPP_
#define REFSMITH_TOOLS_CLI_HPP_

#include <string>
#include <vector>

namespace refsmith::cli {

// Exit codes of the refsmith command.
enum ExitCode : int {
  kOk = 0,
  kDataError = 1,
  kUsageError = 2,
  kProtocolError = 3,
};

// Runs the command line; args excludes the program name.
int Run(const std::vector<std::string>& args);

}  // namespace refsmith::cli

#endif  // REFSMITH_TOOLS_CLI_HPP_
