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

#include <gtest/gtest.h>

#include "dramorigin/error.h"
#include "test_util.h"

namespace dramorigin {
namespace {

TEST(ExpectedBit, SolidAndStripeValues) {
  EXPECT_EQ(expected_bit(DataPattern::kSolid1, 17, 63), 1);
  EXPECT_EQ(expected_bit(DataPattern::kSolid0, 17, 63), 0);
  EXPECT_EQ(expected_bit(DataPattern::kColStripe, 0, 0), 1);
  EXPECT_EQ(expected_bit(DataPattern::kColStripe, 0, 1), 0);
  EXPECT_EQ(expected_bit(DataPattern::kInvColStripe, 0, 0), 0);
  EXPECT_EQ(expected_bit(DataPattern::kInvColStripe, 0, 1), 1);
}

TEST(ExpectedBit, TotalOverThePage) {
  for (DataPattern p : kAllPatterns) {
    for (std::size_t w = 0; w < kWordsPerPage; w += 97) {
      for (std::size_t b = 0; b < kBitsPerWord; ++b) {
        EXPECT_EQ(expected_bit(p, w, b), oracle::written_bit(dataset_index(p), b));
      }
    }
  }
}

TEST(ExpectedBit, OutOfRangeThrows) {
  EXPECT_THROW(expected_bit(DataPattern::kSolid1, 1024, 0), DomainError);
  EXPECT_THROW(expected_bit(DataPattern::kSolid1, 0, 64), DomainError);
}

TEST(ExpectedBit, InvColStripeHasHalfOnes) {
  EXPECT_EQ(BitMatrix::filled(DataPattern::kInvColStripe).popcount(), 32768u);
}

TEST(DataPattern, ComplementPairs) {
  EXPECT_EQ(complement(DataPattern::kSolid1), DataPattern::kSolid0);
  EXPECT_EQ(complement(DataPattern::kColStripe), DataPattern::kInvColStripe);
  for (DataPattern p : kAllPatterns) {
    EXPECT_EQ(complement(complement(p)), p);
    EXPECT_EQ(~BitMatrix::filled(p), BitMatrix::filled(complement(p)));
  }
  EXPECT_FALSE(pattern_from_id(0).has_value());
  EXPECT_FALSE(pattern_from_id(5).has_value());
  EXPECT_EQ(pattern_from_id(3), DataPattern::kColStripe);
}

TEST(BitMatrix, ByteLayoutIsBigEndianMsbFirst) {
  BitMatrix m;
  m.set(0, 0, true);
  m.set(1, 63, true);
  const auto bytes = m.to_bytes();
  ASSERT_EQ(bytes.size(), kPagePayloadBytes);
  EXPECT_EQ(bytes[0], 0x80);
  EXPECT_EQ(bytes[15], 0x01);
  EXPECT_EQ(BitMatrix::from_bytes(bytes), m);
  EXPECT_THROW(BitMatrix::from_words(std::vector<std::uint64_t>(10)), DomainError);
}

TEST(PageDump, BankRangeAndDefaultCondition) {
  EXPECT_THROW(PageDump("M", 8, 0, DataPattern::kSolid1, BitMatrix()), DomainError);
  EXPECT_THROW(PageDump("M", -1, 0, DataPattern::kSolid1, BitMatrix()), DomainError);
  PageDump p("M", 7, 5, DataPattern::kSolid1, BitMatrix());
  EXPECT_EQ(p.condition(), Condition::kNVRT);
}

TEST(FlipMap, CleanPageHasNoFlips) {
  for (DataPattern p : kAllPatterns) {
    PageDump page("M", 0, 0, p, BitMatrix::filled(p));
    EXPECT_EQ(compute_flip_map(page).flips().popcount(), 0u);
  }
}

TEST(FlipMap, SingleFlipLocated) {
  auto read = BitMatrix::filled(DataPattern::kSolid1);
  read.set(5, 12, false);
  const FlipMap f = compute_flip_map(PageDump("M", 0, 0, DataPattern::kSolid1, read));
  EXPECT_EQ(f.flips().popcount(), 1u);
  EXPECT_TRUE(f.flips().get(5, 12));
}

TEST(FlipMap, MatchesPerCellXorOracle) {
  Rng rng(11);
  const auto read = testutil::random_matrix(rng);
  const FlipMap f = compute_flip_map(PageDump("M", 0, 0, DataPattern::kColStripe, read));
  const auto bytes = read.to_bytes();
  for (std::size_t w = 0; w < kWordsPerPage; ++w) {
    for (std::size_t b = 0; b < kBitsPerWord; ++b) {
      const bool flipped = oracle::payload_bit(bytes, w, b) != oracle::written_bit(3, b);
      ASSERT_EQ(f.flips().get(w, b), flipped) << w << "," << b;
    }
  }
}

TEST(FlipsToOne, SolidOneNeverFlipsUp) {
  Rng rng(12);
  const auto read = testutil::noisy_matrix(DataPattern::kSolid1, 0.1, rng);
  PageDump page("M", 0, 0, DataPattern::kSolid1, read);
  EXPECT_EQ(flips_to_one_count(compute_flip_map(page), page), 0u);
}

TEST(FlipsToOne, ColStripeReadAllOnes) {
  PageDump page("M", 0, 0, DataPattern::kColStripe, BitMatrix::filled(DataPattern::kSolid1));
  EXPECT_EQ(flips_to_one_count(compute_flip_map(page), page), 32768u);
}

TEST(FlipsToOne, MatchesCellScan) {
  Rng rng(13);
  for (DataPattern p : kAllPatterns) {
    PageDump page("M", 0, 0, p, testutil::random_matrix(rng));
    EXPECT_EQ(flips_to_one_count(compute_flip_map(page), page),
              oracle::flipped_to_one(page.read_back().to_bytes(), dataset_index(p)));
  }
}

TEST(FlipsToOne, MismatchedPatternThrows) {
  PageDump a("M", 0, 0, DataPattern::kColStripe, BitMatrix());
  PageDump b("M", 0, 0, DataPattern::kInvColStripe, BitMatrix());
  EXPECT_THROW(flips_to_one_count(compute_flip_map(a), b), DomainError);
}

// Properties over random pages.

TEST(PageProperties, CountsOrderedAndReconstructible) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    for (DataPattern p : kAllPatterns) {
      const auto read = trial % 2 ? testutil::random_matrix(rng)
                                  : testutil::noisy_matrix(p, 0.01 * trial, rng);
      PageDump page("M", 0, 0, p, read);
      const FlipMap f = compute_flip_map(page);
      const std::size_t up = flips_to_one_count(f, page);
      EXPECT_LE(up, f.flips().popcount());
      EXPECT_LE(f.flips().popcount(), kCellsPerPage);
      EXPECT_EQ(BitMatrix::filled(p) ^ f.flips(), read);
    }
  }
}

TEST(PageProperties, SolidFlipDirections) {
  Rng rng(15);
  for (DataPattern p : {DataPattern::kSolid1, DataPattern::kSolid0}) {
    const auto read = testutil::random_matrix(rng);
    const FlipMap f = compute_flip_map(PageDump("M", 0, 0, p, read));
    for (std::size_t w = 0; w < kWordsPerPage; ++w) {
      for (std::size_t b = 0; b < kBitsPerWord; ++b) {
        if (!f.flips().get(w, b)) continue;
        ASSERT_EQ(read.get(w, b), p == DataPattern::kSolid0);
      }
    }
  }
}

TEST(PageProperties, StripeComplementSymmetry) {
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = testutil::random_matrix(rng);
    const FlipMap a = compute_flip_map(PageDump("M", 0, 0, DataPattern::kColStripe, x));
    const FlipMap b = compute_flip_map(PageDump("M", 0, 0, DataPattern::kInvColStripe, ~x));
    EXPECT_EQ(a.flips(), b.flips());
  }
}

TEST(Condition, NamesRoundTrip) {
  for (Condition c : {Condition::kNVRT, Condition::kHVRT, Condition::kLVRT, Condition::kNVHT}) {
    EXPECT_EQ(condition_from_name(condition_name(c)), c);
    EXPECT_EQ(condition_from_id(static_cast<std::uint8_t>(c)), c);
  }
  EXPECT_FALSE(condition_from_id(4).has_value());
}

}  // namespace
}  // namespace dramorigin
