// Copyright 2026 The pyreval Authors.
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

#ifndef PYREVAL_CLI_H_
#define PYREVAL_CLI_H_

// The pyreval command line, callable in-process.
//
// Exit codes: 0 success, 1 input validation failure, 2 usage or runtime
// error.

#include <iosfwd>
#include <string>
#include <vector>

#include "pyreval/scoring.h"

namespace pyreval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Name of the environment variable holding the default sidecar URL.
inline constexpr const char* kNliUrlEnv = "PYREVAL_NLI_URL";

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// selection.jsonl: {"example_id", "sentence_id", "decision", "x", "model_hash"}.
DatasetSelection ParseSelection(std::string_view jsonl);

}  // namespace pyreval

#endif  // PYREVAL_CLI_H_
