// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RCRAF_TOOLS_CLI_HPP_
#define RCRAF_TOOLS_CLI_HPP_

// Command-line front end. Subcommands:
//
//   activation-table  sparsity  bounds  gen-data
//   train  train-adv  attack-eval  sweep-alpha
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
// Every subcommand accepts --config <file.json>; values from the file are
// applied first, so explicit flags win. A run with --out also writes
// <out>.manifest.json, which can be passed back as --config.

#include <iosfwd>
#include <string>
#include <vector>

namespace rcraf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace rcraf::cli

#endif  // RCRAF_TOOLS_CLI_HPP_
