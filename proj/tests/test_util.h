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


#ifndef DRAMORIGIN_TESTS_TEST_UTIL_H_
#define DRAMORIGIN_TESTS_TEST_UTIL_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "dramorigin/features.h"
#include "dramorigin/pagedata.h"
#include "dramorigin/rng.h"
#include "oracle/reference_features.h"

namespace testutil {

inline dramorigin::BitMatrix random_matrix(dramorigin::Rng& rng) {
  std::vector<std::uint64_t> w(dramorigin::kWordsPerPage);
  for (auto& x : w) x = rng.next();
  return dramorigin::BitMatrix::from_words(std::move(w));
}

// Written pattern with each cell flipped independently with probability p.
inline dramorigin::BitMatrix noisy_matrix(dramorigin::DataPattern pattern, double p,
                                          dramorigin::Rng& rng) {
  auto m = dramorigin::BitMatrix::filled(pattern);
  for (std::size_t w = 0; w < dramorigin::kWordsPerPage; ++w) {
    for (std::size_t b = 0; b < dramorigin::kBitsPerWord; ++b) {
      if (rng.uniform() < p) m.flip(w, b);
    }
  }
  return m;
}

inline dramorigin::PageGroup group_from(const std::array<dramorigin::BitMatrix, 4>& reads,
                                        const std::string& module = "M", int bank = 0,
                                        std::uint32_t row = 0) {
  std::vector<dramorigin::PageDump> pages;
  for (std::size_t k = 0; k < 4; ++k) {
    pages.emplace_back(module, bank, row, dramorigin::kAllPatterns[k], reads[k]);
  }
  return dramorigin::PageGroup(std::move(pages));
}

inline std::array<oracle::Payload, 4> payloads_of(const dramorigin::PageGroup& g) {
  std::array<oracle::Payload, 4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    out[k] = g.page(dramorigin::kAllPatterns[k]).read_back().to_bytes();
  }
  return out;
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("dramorigin_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#endif  // DRAMORIGIN_TESTS_TEST_UTIL_H_
