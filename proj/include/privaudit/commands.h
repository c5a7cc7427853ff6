/*
 * Copyright 2026 The Privaudit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line entry point.
//
// Exit codes: 0 success, 2 bad flags / missing or malformed input, 3 the
// analysis itself failed (for example an unmet model-count precondition).
// Diagnostics go to stderr; reports go to --report or stdout.

#ifndef PRIVAUDIT_COMMANDS_H_
#define PRIVAUDIT_COMMANDS_H_

#include <string>
#include <vector>

#include "absl/status/status.h"

namespace privaudit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAnalysis = 3;

// Environment variable consulted when --seed is not given.
inline constexpr char kSeedEnv[] = "PRIVAUDIT_SEED";

int ExitCodeFor(const absl::Status& status);

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args);

}  // namespace privaudit

#endif  // PRIVAUDIT_COMMANDS_H_
