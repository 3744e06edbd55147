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

#ifndef DRAMORIGIN_FEATURES_H_
#define DRAMORIGIN_FEATURES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dramorigin/pagedata.h"

namespace dramorigin {

using Point = std::vector<double>;

inline constexpr std::size_t kFeatureCount = 26;

// Per-page statistics, numbered in canonical order.
enum class Statistic : int {
  kFailedBitCount = 1,
  kFlipsToOne = 2,
  kCompressionRatio = 3,
  kWordBlockStd = 4,   // 64x1 tiles
  kByteBlockStd = 5,   // 1x8 tiles
  kColumnStd = 6,      // 1024x1 tiles
  kWordStd = 7,        // 1x64 tiles
};

struct FeatureSlot {
  int dataset;  // 1..4, same numbering as DataPattern ids
  Statistic statistic;
};

// Canonical order: for datasets 1..4 every statistic except flips_to_one,
// then flips_to_one of dataset 3 and of dataset 4.
const std::array<FeatureSlot, kFeatureCount>& feature_layout();
std::size_t feature_index(int dataset, Statistic statistic);
std::string feature_column_name(std::size_t index);  // "f01".."f26"
std::string feature_description(std::size_t index);  // "solid1.failed_bits" etc.
std::string_view statistic_name(Statistic statistic);

/// Identifies the feature layout and every convention that changes feature
/// values (bit order, std normalization, deflate configuration). Models
/// carry it; verification refuses a model with a different fingerprint.
const std::string& feature_fingerprint();

class FeatureVector {
 public:
  FeatureVector() { values_.fill(0.0); }
  explicit FeatureVector(const std::array<double, kFeatureCount>& values)
      : values_(values) {}
  /// Throws DomainError when values.size() != 26.
  static FeatureVector from_span(std::span<const double> values);

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(int dataset, Statistic statistic) const { return values_[feature_index(dataset, statistic)]; }
  const std::array<double, kFeatureCount>& values() const { return values_; }
  Point to_point() const { return Point(values_.begin(), values_.end()); }

  bool operator==(const FeatureVector&) const = default;

 private:
  std::array<double, kFeatureCount> values_;
};

/// Tile shape in words x bits. Only the four canonical shapes are accepted.
struct BlockSpec {
  std::size_t height;
  std::size_t width;
  bool operator==(const BlockSpec&) const = default;
};

inline constexpr BlockSpec kWordBlockTile{64, 1};
inline constexpr BlockSpec kByteBlockTile{1, 8};
inline constexpr BlockSpec kColumnTile{1024, 1};
inline constexpr BlockSpec kWordTile{1, 64};

/// Four reads of the same (module, bank, row), one per data pattern.
class PageGroup {
 public:
  /// Accepts the pages in any order. Throws DomainError unless the four
  /// pages share module, bank and row and cover every pattern exactly once.
  explicit PageGroup(std::vector<PageDump> pages);

  const PageDump& page(DataPattern p) const {
    return pages_[static_cast<std::size_t>(dataset_index(p) - 1)];
  }
  const std::string& module_id() const { return pages_[0].module_id(); }
  int bank() const { return pages_[0].bank(); }
  std::uint32_t row() const { return pages_[0].row(); }

 private:
  std::vector<PageDump> pages_;  // indexed by dataset - 1
};

std::size_t failed_bit_count(const FlipMap& flip_map);

/// Throws DomainError for solid patterns, where the feature is undefined.
std::size_t flips_to_one(const FlipMap& flip_map, const PageDump& page);

/// Raw DEFLATE (RFC 1951, no zlib/gzip framing) at level 6, default
/// strategy, 32 KiB window, memLevel 8. Returns the compressed length.
std::size_t deflate_size(std::span<const std::uint8_t> data);

/// 8192 / deflate_size(read-back payload).
double compression_ratio(const PageDump& page);

/// Population standard deviation of per-tile flip counts.
double block_std(const FlipMap& flip_map, BlockSpec spec);

FeatureVector extract_features(const PageGroup& group);

}  // namespace dramorigin

#endif  // DRAMORIGIN_FEATURES_H_
