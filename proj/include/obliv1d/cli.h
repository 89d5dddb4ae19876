// Copyright 2026 The Obliv1D Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obliv1d {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitOperational = 3;
inline constexpr int kExitAbort = 4;

// Entry point of the `obliv1d` tool. `args` excludes the program name.
// Results go to `out`, diagnostics and log lines to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Path of the committed desk-scale model.
std::string DefaultModelPath();

}  // namespace obliv1d
