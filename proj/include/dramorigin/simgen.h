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

#ifndef DRAMORIGIN_SIMGEN_H_
#define DRAMORIGIN_SIMGEN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dramorigin/dumpio.h"
#include "dramorigin/features.h"
#include "dramorigin/pagedata.h"

namespace dramorigin {

// Synthetic reduced-latency read failures. A failing cell loses its charge
// during the shortened activation, so only charged cells can flip: a
// true-cell storing 1 reads 0, an anti-cell storing 0 reads 1.
//
// Per-cell flip probability:
//   base * module_scale * row_factor * column_bias[b] * chip_bias[b / 8]
//        * pattern_multiplier[dataset - 1] * locality(64-word block, b)
//        * (weak ? weak_multiplier : 1)
// clamped to [0, 1]. module_scale, row_factor and locality are unit-mean
// log-normal draws fixed at fabrication (seeded by module), the flips
// themselves are drawn per read.
struct ClassProfile {
  std::int32_t class_tag = 0;
  std::string manufacturer;
  std::string part_number;
  std::string spd_version;
  std::string garber_version;

  double base_flip_prob = 1e-3;
  std::array<double, 64> column_bias{};
  std::array<double, 8> chip_bias{};
  double locality_sigma = 0.0;
  // Orientation of cell (row, b): anti iff bit b of anti_column_mask (MSB
  // first) XOR ((row + anti_region_offset) / anti_region_rows) is odd.
  // anti_region_rows == 0 disables the row-region term.
  std::uint64_t anti_column_mask = 0;
  std::uint32_t anti_region_rows = 0;
  std::uint32_t anti_region_offset = 0;
  std::array<double, 4> pattern_multiplier{1.0, 1.0, 1.0, 1.0};
  double weak_fraction = 0.0;
  double weak_multiplier = 1.0;
  double row_noise_sigma = 0.0;
  double module_sigma = 0.0;

  /// Throws DomainError for probabilities outside [0, 1], non-positive
  /// multipliers or negative sigmas.
  void validate() const;
  bool operator==(const ClassProfile&) const = default;
};

/// The shipped seven-class profile set (tags 1..7). Synthetic, not
/// calibrated to silicon; classes 6 and 7 share vendor and part number and
/// differ only in board layout version.
std::vector<ClassProfile> default_profiles();

inline constexpr int kProfileFormatVersion = 1;
std::string profiles_to_json(std::span<const ClassProfile> profiles);
std::vector<ClassProfile> profiles_from_json(std::string_view text);
void save_profiles(std::span<const ClassProfile> profiles, const std::filesystem::path& path);
std::vector<ClassProfile> load_profiles(const std::filesystem::path& path);

/// One fabricated module: a profile plus the seed of its process variation.
class ModuleInstance {
 public:
  ModuleInstance(ClassProfile profile, std::uint64_t seed);

  const ClassProfile& profile() const { return profile_; }
  std::uint64_t seed() const { return seed_; }
  double module_scale() const { return module_scale_; }

  bool is_anti_cell(std::uint32_t row, std::size_t bit) const;
  /// Charge-loss failures can only flip cells holding this value.
  bool charged_value(std::uint32_t row, std::size_t bit) const {
    return !is_anti_cell(row, bit);
  }
  /// Weak cells of one row, realized deterministically from the seed.
  BitMatrix weak_map(int bank, std::uint32_t row) const;

  bool operator==(const ModuleInstance&) const = default;

 private:
  ClassProfile profile_;
  std::uint64_t seed_;
  double module_scale_;
};

ModuleInstance realize_module(const ClassProfile& profile, std::uint64_t seed);

PageDump generate_page(const ModuleInstance& module, const std::string& module_id, int bank,
                       std::uint32_t row, DataPattern pattern, std::uint64_t read_seed);
PageGroup generate_page_group(const ModuleInstance& module, const std::string& module_id,
                              int bank, std::uint32_t row, std::uint64_t read_seed);

// Corpus layout: the i-th sampled row of a module is bank i % 8, row i / 8.
struct RowAddress {
  int bank;
  std::uint32_t row;
};
RowAddress corpus_row(std::size_t index);

std::uint64_t module_seed(std::uint64_t master_seed, std::int32_t class_tag,
                          std::size_t module_index);
std::uint64_t read_seed(std::uint64_t module_seed, int bank, std::uint32_t row);
std::string corpus_module_id(std::int32_t class_tag, std::size_t module_index);
ModuleRecord module_record(const ClassProfile& profile, std::string module_id);

/// All 4 * rows pages of one corpus module, in (row index, pattern) order.
std::vector<PageDump> generate_module_pages(const ModuleInstance& module,
                                           const std::string& module_id, std::size_t rows);

struct CorpusEntry {
  std::filesystem::path file;  // relative to the corpus directory
  std::string module_id;
  std::int32_t class_tag = 0;
};

/// Writes one dump per module plus manifest.csv (file,module_id,class_tag).
/// Output is a pure function of the arguments.
std::vector<CorpusEntry> generate_corpus(std::span<const ClassProfile> profiles,
                                         std::size_t modules_per_class,
                                         std::size_t rows_per_module, std::uint64_t master_seed,
                                         const std::filesystem::path& out_dir);

std::vector<CorpusEntry> read_manifest(const std::filesystem::path& manifest);

}  // namespace dramorigin

#endif  // DRAMORIGIN_SIMGEN_H_
