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

#include "dramorigin/error.h"

namespace dramorigin {

FormatError::FormatError(const std::string& what, std::uint64_t offset,
                         std::optional<std::uint64_t> page_index)
    : std::runtime_error(what + " (byte offset " + std::to_string(offset) +
                         (page_index ? ", page " + std::to_string(*page_index) : "") +
                         ")"),
      offset_(offset),
      page_index_(page_index) {}

}  // namespace dramorigin
