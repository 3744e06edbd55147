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

#include "dramorigin/features.h"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <optional>

#include "dramorigin/error.h"

namespace dramorigin {
namespace {

constexpr int kDeflateLevel = 6;
constexpr int kDeflateWindowBits = -15;  // negative: raw stream, no header
constexpr int kDeflateMemLevel = 8;

std::array<FeatureSlot, kFeatureCount> build_layout() {
  std::array<FeatureSlot, kFeatureCount> layout{};
  constexpr std::array<Statistic, 6> per_dataset = {
      Statistic::kFailedBitCount, Statistic::kCompressionRatio, Statistic::kWordBlockStd,
      Statistic::kByteBlockStd,   Statistic::kColumnStd,        Statistic::kWordStd};
  std::size_t i = 0;
  for (int d = 1; d <= 4; ++d) {
    for (Statistic p : per_dataset) layout[i++] = {d, p};
  }
  layout[i++] = {3, Statistic::kFlipsToOne};
  layout[i++] = {4, Statistic::kFlipsToOne};
  return layout;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// In-place transpose of a 64x64 bit block: afterwards word j holds what was
// bit column j (same MSB-first convention).
void transpose64(std::array<std::uint64_t, 64>& a) {
  std::uint64_t m = 0x00000000FFFFFFFFULL;
  for (unsigned j = 32; j != 0; j >>= 1, m ^= m << j) {
    for (unsigned k = 0; k < 64; k = ((k | j) + 1) & ~j) {
      const std::uint64_t t = (a[k] ^ (a[k | j] >> j)) & m;
      a[k] ^= t;
      a[k | j] ^= t << j;
    }
  }
}

// Population std from integer moments, exact up to the final sqrt.
double population_std(std::uint64_t n, std::uint64_t sum, std::uint64_t sum_sq) {
  const unsigned __int128 num = static_cast<unsigned __int128>(n) * sum_sq -
                                static_cast<unsigned __int128>(sum) * sum;
  return std::sqrt(static_cast<double>(num)) / static_cast<double>(n);
}

// Per-(64-word block, column) flip counts: 16 x 64.
std::array<std::array<std::uint32_t, 64>, 16> word_block_counts(const BitMatrix& m) {
  std::array<std::array<std::uint32_t, 64>, 16> counts{};
  std::array<std::uint64_t, 64> block{};
  for (std::size_t blk = 0; blk < 16; ++blk) {
    for (std::size_t i = 0; i < 64; ++i) block[i] = m.word(blk * 64 + i);
    transpose64(block);
    for (std::size_t col = 0; col < 64; ++col) {
      counts[blk][col] = static_cast<std::uint32_t>(std::popcount(block[col]));
    }
  }
  return counts;
}

struct Moments {
  std::uint64_t n = 0, sum = 0, sum_sq = 0;
  void add(std::uint64_t c) {
    ++n;
    sum += c;
    sum_sq += c * c;
  }
  double stddev() const { return population_std(n, sum, sum_sq); }
};

struct BlockStds {
  double word_block, byte_block, column, word;
};

BlockStds all_block_stds(const BitMatrix& m) {
  Moments byte_m, word_m, wblock_m, column_m;
  for (std::size_t w = 0; w < kWordsPerPage; ++w) {
    const std::uint64_t v = m.word(w);
    word_m.add(static_cast<std::uint64_t>(std::popcount(v)));
    for (int b = 0; b < 8; ++b) {
      byte_m.add(static_cast<std::uint64_t>(std::popcount((v >> (8 * b)) & 0xFFU)));
    }
  }
  const auto blocks = word_block_counts(m);
  std::array<std::uint64_t, 64> columns{};
  for (const auto& blk : blocks) {
    for (std::size_t col = 0; col < 64; ++col) {
      wblock_m.add(blk[col]);
      columns[col] += blk[col];
    }
  }
  for (std::uint64_t c : columns) column_m.add(c);
  return {wblock_m.stddev(), byte_m.stddev(), column_m.stddev(), word_m.stddev()};
}

}  // namespace

const std::array<FeatureSlot, kFeatureCount>& feature_layout() {
  static const auto layout = build_layout();
  return layout;
}

std::size_t feature_index(int dataset, Statistic statistic) {
  const auto& layout = feature_layout();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].dataset == dataset && layout[i].statistic == statistic) return i;
  }
  throw DomainError("no feature for statistic " +
                    std::string(statistic_name(statistic)) + " on dataset " +
                    std::to_string(dataset));
}

std::string_view statistic_name(Statistic statistic) {
  switch (statistic) {
    case Statistic::kFailedBitCount: return "failed_bits";
    case Statistic::kFlipsToOne: return "flips_to_one";
    case Statistic::kCompressionRatio: return "compression_ratio";
    case Statistic::kWordBlockStd: return "word_block_std";
    case Statistic::kByteBlockStd: return "byte_block_std";
    case Statistic::kColumnStd: return "column_std";
    case Statistic::kWordStd: return "word_std";
  }
  return "unknown";
}

std::string feature_column_name(std::size_t index) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "f%02zu", index + 1);
  return buf;
}

std::string feature_description(std::size_t index) {
  const FeatureSlot& s = feature_layout().at(index);
  return std::string(pattern_name(kAllPatterns.at(s.dataset - 1))) + "." +
         std::string(statistic_name(s.statistic));
}

const std::string& feature_fingerprint() {
  static const std::string fp = [] {
    std::string desc = "layout=";
    for (std::size_t i = 0; i < kFeatureCount; ++i) desc += feature_description(i) + ",";
    desc += ";bitorder=msb0;stripe=per-bit-even-one;std=population;";
    desc += "deflate=raw,level" + std::to_string(kDeflateLevel) +
            ",wbits15,mem8,default;su=8192";
    char buf[32];
    std::snprintf(buf, sizeof buf, "fv1-%016llx",
                  static_cast<unsigned long long>(fnv1a(desc)));
    return std::string(buf);
  }();
  return fp;
}

FeatureVector FeatureVector::from_span(std::span<const double> values) {
  if (values.size() != kFeatureCount) {
    throw DomainError("feature vector must have 26 values, got " +
                      std::to_string(values.size()));
  }
  std::array<double, kFeatureCount> a{};
  std::copy(values.begin(), values.end(), a.begin());
  return FeatureVector(a);
}

PageGroup::PageGroup(std::vector<PageDump> pages) {
  if (pages.size() != 4) {
    throw DomainError("page group needs 4 pages, got " + std::to_string(pages.size()));
  }
  const std::string module_id = pages[0].module_id();
  const int bank = pages[0].bank();
  const std::uint32_t row = pages[0].row();
  std::array<std::optional<PageDump>, 4> slots;
  for (auto& p : pages) {
    if (p.module_id() != module_id || p.bank() != bank || p.row() != row) {
      throw DomainError("page group mixes modules, banks or rows");
    }
    auto& slot = slots[static_cast<std::size_t>(dataset_index(p.pattern()) - 1)];
    if (slot) {
      throw DomainError("page group repeats pattern " + std::string(pattern_name(p.pattern())));
    }
    slot = std::move(p);
  }
  pages_.reserve(4);
  for (auto& s : slots) pages_.push_back(std::move(*s));
}

std::size_t failed_bit_count(const FlipMap& flip_map) { return flip_map.flips().popcount(); }

std::size_t flips_to_one(const FlipMap& flip_map, const PageDump& page) {
  if (page.pattern() == DataPattern::kSolid1 || page.pattern() == DataPattern::kSolid0) {
    throw DomainError("flips-to-one feature is only defined for stripe patterns");
  }
  return flips_to_one_count(flip_map, page);
}

std::size_t deflate_size(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (deflateInit2(&zs, kDeflateLevel, Z_DEFLATED, kDeflateWindowBits,
                   kDeflateMemLevel, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const std::size_t n = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw std::runtime_error("deflate did not finish");
  return n;
}

double compression_ratio(const PageDump& page) {
  const auto payload = page.read_back().to_bytes();
  return static_cast<double>(kPagePayloadBytes) /
         static_cast<double>(deflate_size(payload));
}

double block_std(const FlipMap& flip_map, BlockSpec spec) {
  const BitMatrix& m = flip_map.flips();
  Moments mom;
  if (spec == kWordTile) {
    for (std::size_t w = 0; w < kWordsPerPage; ++w) {
      mom.add(static_cast<std::uint64_t>(std::popcount(m.word(w))));
    }
  } else if (spec == kByteBlockTile) {
    for (std::size_t w = 0; w < kWordsPerPage; ++w) {
      for (int b = 0; b < 8; ++b) {
        mom.add(static_cast<std::uint64_t>(std::popcount((m.word(w) >> (8 * b)) & 0xFFU)));
      }
    }
  } else if (spec == kWordBlockTile || spec == kColumnTile) {
    const auto blocks = word_block_counts(m);
    if (spec == kWordBlockTile) {
      for (const auto& blk : blocks) {
        for (std::uint32_t c : blk) mom.add(c);
      }
    } else {
      for (std::size_t col = 0; col < 64; ++col) {
        std::uint64_t c = 0;
        for (const auto& blk : blocks) c += blk[col];
        mom.add(c);
      }
    }
  } else {
    throw DomainError("block spec " + std::to_string(spec.height) + "x" +
                      std::to_string(spec.width) + " is not one of the canonical tilings");
  }
  return mom.stddev();
}

FeatureVector extract_features(const PageGroup& group) {
  FeatureVector fv;
  for (DataPattern p : kAllPatterns) {
    const int d = dataset_index(p);
    const PageDump& page = group.page(p);
    const FlipMap fm = compute_flip_map(page);
    const BlockStds stds = all_block_stds(fm.flips());
    fv[feature_index(d, Statistic::kFailedBitCount)] = static_cast<double>(failed_bit_count(fm));
    fv[feature_index(d, Statistic::kCompressionRatio)] = compression_ratio(page);
    fv[feature_index(d, Statistic::kWordBlockStd)] = stds.word_block;
    fv[feature_index(d, Statistic::kByteBlockStd)] = stds.byte_block;
    fv[feature_index(d, Statistic::kColumnStd)] = stds.column;
    fv[feature_index(d, Statistic::kWordStd)] = stds.word;
    if (p == DataPattern::kColStripe || p == DataPattern::kInvColStripe) {
      fv[feature_index(d, Statistic::kFlipsToOne)] =
          static_cast<double>(flips_to_one(fm, page));
    }
  }
  return fv;
}

}  // namespace dramorigin
