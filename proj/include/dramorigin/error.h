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

#ifndef DRAMORIGIN_ERROR_H_
#define DRAMORIGIN_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dramorigin {

/// A precondition on the arguments of an operation was violated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed binary or text input. Carries the byte offset where decoding
/// stopped and, for page payload failures, the zero-based page index.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset,
              std::optional<std::uint64_t> page_index = std::nullopt);

  std::uint64_t offset() const { return offset_; }
  std::optional<std::uint64_t> page_index() const { return page_index_; }

 private:
  std::uint64_t offset_;
  std::optional<std::uint64_t> page_index_;
};

/// The dual solver hit its iteration cap before reaching KKT tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double kkt_residual,
                   std::uint64_t iterations)
      : std::runtime_error(what),
        kkt_residual_(kkt_residual),
        iterations_(iterations) {}

  double kkt_residual() const { return kkt_residual_; }
  std::uint64_t iterations() const { return iterations_; }

 private:
  double kkt_residual_;
  std::uint64_t iterations_;
};

}  // namespace dramorigin

#endif  // DRAMORIGIN_ERROR_H_
