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

#ifndef DRAMORIGIN_PAGEDATA_H_
#define DRAMORIGIN_PAGEDATA_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dramorigin {

// One DRAM page: 1024 words of 64 bits, read back as a bit matrix with one
// row per word. Bit index 0 is the most significant bit of the word.
inline constexpr std::size_t kWordsPerPage = 1024;
inline constexpr std::size_t kBitsPerWord = 64;
inline constexpr std::size_t kCellsPerPage = kWordsPerPage * kBitsPerWord;
inline constexpr std::size_t kPagePayloadBytes = kWordsPerPage * 8;
inline constexpr int kBanksPerModule = 8;

// The ids double as the on-disk pattern byte and the dataset number (1..4).
enum class DataPattern : std::uint8_t {
  kSolid1 = 1,        // all ones
  kSolid0 = 2,        // all zeros
  kColStripe = 3,     // 1010... within each word
  kInvColStripe = 4,  // 0101... within each word
};

inline constexpr std::array<DataPattern, 4> kAllPatterns = {
    DataPattern::kSolid1, DataPattern::kSolid0, DataPattern::kColStripe,
    DataPattern::kInvColStripe};

constexpr int dataset_index(DataPattern p) { return static_cast<int>(p); }
std::optional<DataPattern> pattern_from_id(std::uint8_t id);
DataPattern complement(DataPattern p);
std::string_view pattern_name(DataPattern p);

// Operating conditions are labels only; they do not alter any computation.
enum class Condition : std::uint8_t { kNVRT = 0, kHVRT = 1, kLVRT = 2, kNVHT = 3 };

std::optional<Condition> condition_from_id(std::uint8_t id);
std::optional<Condition> condition_from_name(std::string_view name);
std::string_view condition_name(Condition c);

/// The word written to every row of a page for the given pattern.
constexpr std::uint64_t expected_word(DataPattern p) {
  switch (p) {
    case DataPattern::kSolid1: return ~std::uint64_t{0};
    case DataPattern::kSolid0: return 0;
    case DataPattern::kColStripe: return 0xAAAAAAAAAAAAAAAAULL;
    case DataPattern::kInvColStripe: return 0x5555555555555555ULL;
  }
  return 0;
}

/// Throws DomainError when word >= 1024 or bit >= 64.
int expected_bit(DataPattern pattern, std::size_t word, std::size_t bit);

/// Fixed-size 1024x64 bit matrix stored row-major, one uint64 per word.
class BitMatrix {
 public:
  BitMatrix() : words_(kWordsPerPage, 0) {}

  static BitMatrix filled(DataPattern pattern);
  /// Throws DomainError unless exactly 1024 words are given.
  static BitMatrix from_words(std::vector<std::uint64_t> words);
  /// Decodes an 8192-byte payload; each word is stored big-endian so the
  /// byte stream reads bit 0, bit 1, ... of word 0 first.
  static BitMatrix from_bytes(std::span<const std::uint8_t> payload);

  void to_bytes(std::span<std::uint8_t> out) const;
  std::vector<std::uint8_t> to_bytes() const;

  bool get(std::size_t word, std::size_t bit) const {
    return (words_[word] >> (63 - bit)) & 1U;
  }
  void set(std::size_t word, std::size_t bit, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (63 - bit);
    words_[word] = value ? (words_[word] | mask) : (words_[word] & ~mask);
  }
  void flip(std::size_t word, std::size_t bit) {
    words_[word] ^= std::uint64_t{1} << (63 - bit);
  }

  std::uint64_t word(std::size_t w) const { return words_[w]; }
  std::uint64_t& word(std::size_t w) { return words_[w]; }
  std::span<const std::uint64_t> words() const { return words_; }

  std::size_t popcount() const;

  BitMatrix operator^(const BitMatrix& other) const;
  BitMatrix operator&(const BitMatrix& other) const;
  BitMatrix operator~() const;
  bool operator==(const BitMatrix&) const = default;

 private:
  std::vector<std::uint64_t> words_;
};

/// One page read back at reduced activation latency.
class PageDump {
 public:
  /// Throws DomainError when bank is outside [0, 8).
  PageDump(std::string module_id, int bank, std::uint32_t row,
           DataPattern pattern, BitMatrix read_back,
           Condition condition = Condition::kNVRT);

  const std::string& module_id() const { return module_id_; }
  int bank() const { return bank_; }
  std::uint32_t row() const { return row_; }
  DataPattern pattern() const { return pattern_; }
  Condition condition() const { return condition_; }
  const BitMatrix& read_back() const { return read_back_; }

  bool operator==(const PageDump&) const = default;

 private:
  std::string module_id_;
  int bank_;
  std::uint32_t row_;
  DataPattern pattern_;
  BitMatrix read_back_;
  Condition condition_;
};

/// Marks cells whose read-back value differs from the written pattern.
class FlipMap {
 public:
  FlipMap(BitMatrix flips, DataPattern source_pattern)
      : flips_(std::move(flips)), source_pattern_(source_pattern) {}

  const BitMatrix& flips() const { return flips_; }
  DataPattern source_pattern() const { return source_pattern_; }

 private:
  BitMatrix flips_;
  DataPattern source_pattern_;
};

FlipMap compute_flip_map(const PageDump& page);

/// Cells written as 0 and read back as 1. Throws DomainError when the flip
/// map was derived from a different pattern than the page carries.
std::size_t flips_to_one_count(const FlipMap& flip_map, const PageDump& page);

}  // namespace dramorigin

#endif  // DRAMORIGIN_PAGEDATA_H_
