// Copyright 2026 The dramorigin Authors
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


#ifndef DRAMORIGIN_CLI_H_
#define DRAMORIGIN_CLI_H_

#include <iosfwd>

namespace dramorigin {

inline constexpr const char* kVersion = "0.1.0";

// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCounterfeit = 2;

/// Entry point of the dramorigin tool. Reports go to out, parameter logs
/// and diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dramorigin

#endif  // DRAMORIGIN_CLI_H_
