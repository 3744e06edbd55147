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

#include "dramorigin/pagedata.h"

#include <bit>
#include <numeric>
#include <string>

#include "dramorigin/error.h"

namespace dramorigin {

std::optional<DataPattern> pattern_from_id(std::uint8_t id) {
  if (id < 1 || id > 4) return std::nullopt;
  return static_cast<DataPattern>(id);
}

DataPattern complement(DataPattern p) {
  switch (p) {
    case DataPattern::kSolid1: return DataPattern::kSolid0;
    case DataPattern::kSolid0: return DataPattern::kSolid1;
    case DataPattern::kColStripe: return DataPattern::kInvColStripe;
    case DataPattern::kInvColStripe: return DataPattern::kColStripe;
  }
  return p;
}

std::string_view pattern_name(DataPattern p) {
  switch (p) {
    case DataPattern::kSolid1: return "solid1";
    case DataPattern::kSolid0: return "solid0";
    case DataPattern::kColStripe: return "colstripe";
    case DataPattern::kInvColStripe: return "invcolstripe";
  }
  return "?";
}

std::optional<Condition> condition_from_id(std::uint8_t id) {
  if (id > 3) return std::nullopt;
  return static_cast<Condition>(id);
}

std::optional<Condition> condition_from_name(std::string_view name) {
  for (std::uint8_t id = 0; id < 4; ++id) {
    auto c = static_cast<Condition>(id);
    if (condition_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::kNVRT: return "NVRT";
    case Condition::kHVRT: return "HVRT";
    case Condition::kLVRT: return "LVRT";
    case Condition::kNVHT: return "NVHT";
  }
  return "?";
}

int expected_bit(DataPattern pattern, std::size_t word, std::size_t bit) {
  if (word >= kWordsPerPage || bit >= kBitsPerWord) {
    throw DomainError("expected_bit: index (" + std::to_string(word) + ", " +
                      std::to_string(bit) + ") outside 1024x64 page");
  }
  return static_cast<int>((expected_word(pattern) >> (63 - bit)) & 1U);
}

BitMatrix BitMatrix::filled(DataPattern pattern) {
  BitMatrix m;
  std::fill(m.words_.begin(), m.words_.end(), expected_word(pattern));
  return m;
}

BitMatrix BitMatrix::from_words(std::vector<std::uint64_t> words) {
  if (words.size() != kWordsPerPage) {
    throw DomainError("BitMatrix needs 1024 words, got " +
                      std::to_string(words.size()));
  }
  BitMatrix m;
  m.words_ = std::move(words);
  return m;
}

BitMatrix BitMatrix::from_bytes(std::span<const std::uint8_t> payload) {
  if (payload.size() != kPagePayloadBytes) {
    throw DomainError("page payload must be 8192 bytes, got " +
                      std::to_string(payload.size()));
  }
  BitMatrix m;
  for (std::size_t w = 0; w < kWordsPerPage; ++w) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | payload[w * 8 + i];
    m.words_[w] = v;
  }
  return m;
}

void BitMatrix::to_bytes(std::span<std::uint8_t> out) const {
  if (out.size() != kPagePayloadBytes) {
    throw DomainError("page payload buffer must be 8192 bytes");
  }
  for (std::size_t w = 0; w < kWordsPerPage; ++w) {
    const std::uint64_t v = words_[w];
    for (std::size_t i = 0; i < 8; ++i) {
      out[w * 8 + i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    }
  }
}

std::vector<std::uint8_t> BitMatrix::to_bytes() const {
  std::vector<std::uint8_t> out(kPagePayloadBytes);
  to_bytes(out);
  return out;
}

std::size_t BitMatrix::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitMatrix BitMatrix::operator^(const BitMatrix& other) const {
  BitMatrix r;
  for (std::size_t i = 0; i < kWordsPerPage; ++i) r.words_[i] = words_[i] ^ other.words_[i];
  return r;
}

BitMatrix BitMatrix::operator&(const BitMatrix& other) const {
  BitMatrix r;
  for (std::size_t i = 0; i < kWordsPerPage; ++i) r.words_[i] = words_[i] & other.words_[i];
  return r;
}

BitMatrix BitMatrix::operator~() const {
  BitMatrix r;
  for (std::size_t i = 0; i < kWordsPerPage; ++i) r.words_[i] = ~words_[i];
  return r;
}

PageDump::PageDump(std::string module_id, int bank, std::uint32_t row,
                   DataPattern pattern, BitMatrix read_back, Condition condition)
    : module_id_(std::move(module_id)),
      bank_(bank),
      row_(row),
      pattern_(pattern),
      read_back_(std::move(read_back)),
      condition_(condition) {
  if (bank < 0 || bank >= kBanksPerModule) {
    throw DomainError("bank " + std::to_string(bank) + " outside [0, 8)");
  }
  if (!pattern_from_id(static_cast<std::uint8_t>(pattern))) {
    throw DomainError("unknown data pattern id");
  }
}

FlipMap compute_flip_map(const PageDump& page) {
  const std::uint64_t written = expected_word(page.pattern());
  BitMatrix flips;
  const BitMatrix& read = page.read_back();
  for (std::size_t w = 0; w < kWordsPerPage; ++w) flips.word(w) = read.word(w) ^ written;
  return FlipMap(std::move(flips), page.pattern());
}

std::size_t flips_to_one_count(const FlipMap& flip_map, const PageDump& page) {
  if (flip_map.source_pattern() != page.pattern()) {
    throw DomainError("flip map pattern " +
                      std::string(pattern_name(flip_map.source_pattern())) +
                      " does not match page pattern " +
                      std::string(pattern_name(page.pattern())));
  }
  std::size_t n = 0;
  const BitMatrix& read = page.read_back();
  for (std::size_t w = 0; w < kWordsPerPage; ++w) {
    n += static_cast<std::size_t>(std::popcount(flip_map.flips().word(w) & read.word(w)));
  }
  return n;
}

}  // namespace dramorigin
