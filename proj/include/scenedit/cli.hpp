// Copyright 2026 The scenedit Authors
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scenedit {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitEditFailed = 1;
inline constexpr int kExitConfigError = 2;

/// Runs `scenedit <subcommand> ...`; args excludes the program name.
///
///   edit   --scene S --prompt P [--annotations A] [--out O] [--report R] ...
///   serve  [--host H] [--port N] [--session-dir D]
///   bench  [--scenes N] [--seed S] [--out CSV] [--json J]
///   replay --session-dir D [--out O]
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scenedit
