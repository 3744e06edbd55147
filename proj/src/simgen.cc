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

#include "dramorigin/simgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "dramorigin/error.h"
#include "dramorigin/parallel.h"
#include "dramorigin/rng.h"

namespace dramorigin {
namespace {

// seed-path tags
constexpr std::uint64_t kModuleTag = 0x4d4f44;  // "MOD"
constexpr std::uint64_t kRowTag = 0x524f57;     // "ROW"
constexpr std::uint64_t kWeakTag = 0x5745414b;  // "WEAK"
constexpr std::uint64_t kReadTag = 0x52454144;  // "READ"

constexpr std::size_t kWordBlocks = kWordsPerPage / 64;

struct RowRealization {
  double row_factor = 1.0;
  std::array<double, kWordBlocks * kBitsPerWord> locality{};  // [block * 64 + bit]
  std::vector<std::uint32_t> weak_cells;                     // word * 64 + bit, ascending
};

std::vector<std::uint32_t> sample_cells(Rng& rng, double fraction) {
  std::vector<std::uint32_t> cells;
  if (fraction <= 0.0) return cells;
  if (fraction >= 1.0) {
    cells.resize(kCellsPerPage);
    for (std::uint32_t i = 0; i < kCellsPerPage; ++i) cells[i] = i;
    return cells;
  }
  const double log_miss = std::log1p(-fraction);
  double pos = -1.0;
  while (true) {
    pos += 1.0 + std::floor(std::log(rng.uniform_open_low()) / log_miss);
    if (pos >= static_cast<double>(kCellsPerPage)) break;
    cells.push_back(static_cast<std::uint32_t>(pos));
  }
  return cells;
}

RowRealization realize_row(const ModuleInstance& m, int bank, std::uint32_t row) {
  const ClassProfile& p = m.profile();
  RowRealization r;
  Rng rng(derive_seed(m.seed(), {kRowTag, static_cast<std::uint64_t>(bank), row}));
  r.row_factor = rng.unit_lognormal(p.row_noise_sigma);
  for (double& l : r.locality) l = rng.unit_lognormal(p.locality_sigma);
  Rng weak(derive_seed(m.seed(), {kWeakTag, static_cast<std::uint64_t>(bank), row}));
  r.weak_cells = sample_cells(weak, p.weak_fraction);
  return r;
}

BitMatrix read_back(const ModuleInstance& m, const RowRealization& rr, std::uint32_t row,
                    DataPattern pattern, std::uint64_t read_seed) {
  const ClassProfile& p = m.profile();
  const std::uint64_t written = expected_word(pattern);
  BitMatrix read = BitMatrix::filled(pattern);
  Rng rng(derive_seed(read_seed, {static_cast<std::uint64_t>(pattern)}));
  const double scale = p.base_flip_prob * m.module_scale() * rr.row_factor *
                       p.pattern_multiplier[static_cast<std::size_t>(dataset_index(pattern) - 1)];

  std::array<double, kWordBlocks * kBitsPerWord> seg_p{};
  for (std::size_t b = 0; b < kBitsPerWord; ++b) {
    const bool written_bit = (written >> (63 - b)) & 1U;
    if (written_bit != m.charged_value(row, b)) continue;  // nothing to lose
    const double col = scale * p.column_bias[b] * p.chip_bias[b / 8];
    for (std::size_t blk = 0; blk < kWordBlocks; ++blk) {
      seg_p[blk * 64 + b] = std::clamp(col * rr.locality[blk * 64 + b], 0.0, 1.0);
    }
  }

  // Bernoulli(p) over each 64-cell segment by geometric skipping.
  for (std::size_t blk = 0; blk < kWordBlocks; ++blk) {
    for (std::size_t b = 0; b < kBitsPerWord; ++b) {
      const double prob = seg_p[blk * 64 + b];
      if (prob <= 0.0) continue;
      if (prob >= 1.0) {
        for (std::size_t w = 0; w < 64; ++w) read.flip(blk * 64 + w, b);
        continue;
      }
      const double log_miss = std::log1p(-prob);
      double pos = -1.0;
      while (true) {
        pos += 1.0 + std::floor(std::log(rng.uniform_open_low()) / log_miss);
        if (pos >= 64.0) break;
        read.flip(blk * 64 + static_cast<std::size_t>(pos), b);
      }
    }
  }

  // Weak cells fail with min(1, p * multiplier): top up the base draw.
  for (std::uint32_t cell : rr.weak_cells) {
    const std::size_t w = cell / 64, b = cell % 64;
    const double prob = seg_p[(w / 64) * 64 + b];
    if (prob <= 0.0 || prob >= 1.0) continue;
    if (read.get(w, b) != static_cast<bool>((written >> (63 - b)) & 1U)) continue;
    const double weak_p = std::min(1.0, prob * p.weak_multiplier);
    const double extra = (weak_p - prob) / (1.0 - prob);
    if (rng.uniform() < extra) read.flip(w, b);
  }
  return read;
}

std::array<double, 64> periodic_bias(double amplitude, int period, int phase, double tilt) {
  std::array<double, 64> bias{};
  for (int b = 0; b < 64; ++b) {
    bias[static_cast<std::size_t>(b)] =
        1.0 + amplitude * std::cos(2.0 * std::numbers::pi * (b + phase) / period) +
        tilt * (b / 63.0 - 0.5);
  }
  return bias;
}

ClassProfile base_profile(std::int32_t tag, std::string manufacturer, std::string part,
                          std::string spd, std::string garber) {
  ClassProfile p;
  p.class_tag = tag;
  p.manufacturer = std::move(manufacturer);
  p.part_number = std::move(part);
  p.spd_version = std::move(spd);
  p.garber_version = std::move(garber);
  p.column_bias.fill(1.0);
  p.chip_bias.fill(1.0);
  p.row_noise_sigma = 0.05;
  p.module_sigma = 0.03;
  return p;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void ClassProfile::validate() const {
  auto fail = [&](const std::string& what) {
    throw DomainError("profile for class " + std::to_string(class_tag) + ": " + what);
  };
  if (!(base_flip_prob >= 0.0 && base_flip_prob <= 1.0)) fail("base_flip_prob outside [0, 1]");
  if (!(weak_fraction >= 0.0 && weak_fraction <= 1.0)) fail("weak_fraction outside [0, 1]");
  if (!(weak_multiplier >= 1.0)) fail("weak_multiplier must be >= 1");
  for (double v : column_bias) {
    if (!(v > 0.0)) fail("column_bias entries must be positive");
  }
  for (double v : chip_bias) {
    if (!(v > 0.0)) fail("chip_bias entries must be positive");
  }
  for (double v : pattern_multiplier) {
    if (!(v > 0.0)) fail("pattern_multiplier entries must be positive");
  }
  if (!(locality_sigma >= 0.0 && row_noise_sigma >= 0.0 && module_sigma >= 0.0)) {
    fail("sigmas must be non-negative");
  }
}

std::vector<ClassProfile> default_profiles() {
  std::vector<ClassProfile> v;

  auto p1 = base_profile(1, "Vendor-A", "A1", "10", "C1");
  p1.base_flip_prob = 2.0e-3;
  p1.column_bias = periodic_bias(0.35, 8, 0, 0.2);
  p1.chip_bias = {1.3, 0.8, 1.1, 0.9, 1.2, 0.7, 1.0, 1.0};
  p1.locality_sigma = 0.25;
  p1.anti_column_mask = 0x0101010101010101ULL;
  p1.pattern_multiplier = {1.0, 1.1, 0.8, 0.9};
  p1.weak_fraction = 0.01;
  p1.weak_multiplier = 8.0;
  v.push_back(p1);

  auto p2 = base_profile(2, "Vendor-A", "A2", "10", "B1");
  p2.base_flip_prob = 8.0e-3;
  p2.column_bias = periodic_bias(0.2, 4, 1, -0.1);
  p2.chip_bias = {1.0, 1.1, 1.0, 0.9, 1.0, 1.1, 1.0, 0.9};
  p2.locality_sigma = 0.4;
  p2.anti_column_mask = 0x00000000FFFFFFFFULL;
  p2.anti_region_rows = 16;
  p2.pattern_multiplier = {1.0, 1.0, 1.3, 1.2};
  p2.weak_fraction = 0.005;
  p2.weak_multiplier = 10.0;
  v.push_back(p2);

  auto p3 = base_profile(3, "Vendor-B", "B1", "10", "B1");
  p3.base_flip_prob = 2.6e-3;
  p3.column_bias = periodic_bias(0.5, 16, 2, 0.0);
  p3.chip_bias = {0.8, 0.8, 1.2, 1.2, 0.8, 0.8, 1.2, 1.2};
  p3.locality_sigma = 0.15;
  p3.anti_column_mask = 0xFFFF0000FFFF0000ULL;
  p3.pattern_multiplier = {1.2, 1.0, 1.0, 1.3};
  p3.weak_fraction = 0.02;
  p3.weak_multiplier = 5.0;
  v.push_back(p3);

  auto p4 = base_profile(4, "Vendor-B", "B2", "11", "B2");
  p4.base_flip_prob = 1.2e-2;
  p4.column_bias = periodic_bias(0.1, 2, 0, 0.3);
  p4.locality_sigma = 0.4;
  p4.anti_column_mask = 0x5555555500000000ULL;
  p4.pattern_multiplier = {0.9, 1.0, 1.1, 1.0};
  p4.weak_fraction = 0.01;
  p4.weak_multiplier = 4.0;
  v.push_back(p4);

  auto p5 = base_profile(5, "Vendor-B", "B3", "11", "B2");
  p5.base_flip_prob = 5.0e-3;
  p5.column_bias = periodic_bias(0.3, 32, 5, 0.1);
  p5.chip_bias = {1.1, 0.9, 1.1, 0.9, 1.1, 0.9, 1.1, 0.9};
  p5.locality_sigma = 0.3;
  p5.anti_column_mask = 0x0F0F0F0F0F0F0F0FULL;
  p5.anti_region_rows = 64;
  p5.anti_region_offset = 32;
  p5.pattern_multiplier = {1.0, 1.0, 0.9, 1.1};
  p5.weak_fraction = 0.015;
  p5.weak_multiplier = 6.0;
  v.push_back(p5);

  auto p6 = base_profile(6, "Vendor-C", "C1", "10", "B1");
  p6.base_flip_prob = 4.4e-3;
  p6.column_bias = periodic_bias(0.25, 8, 3, 0.0);
  p6.chip_bias = {1.2, 1.0, 0.8, 1.0, 1.2, 1.0, 0.8, 1.0};
  p6.locality_sigma = 0.35;
  p6.anti_column_mask = 0x000000000000FFFFULL;
  p6.pattern_multiplier = {1.1, 0.9, 1.0, 1.0};
  p6.weak_fraction = 0.01;
  p6.weak_multiplier = 6.0;
  v.push_back(p6);

  // Same die as class 6 on a different board layout: bitline routing, and
  // with it the anti-cell columns and per-chip placement, shift.
  auto p7 = p6;
  p7.class_tag = 7;
  p7.spd_version = "11";
  p7.garber_version = "B2";
  p7.base_flip_prob = 5.0e-3;
  p7.column_bias = periodic_bias(0.45, 4, 1, 0.15);
  p7.chip_bias = {1.0, 1.4, 1.0, 0.6, 1.0, 1.4, 1.0, 0.6};
  p7.anti_column_mask = 0x0000000000FFFFFFULL;
  v.push_back(p7);

  return v;
}

std::string profiles_to_json(std::span<const ClassProfile> profiles) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& p : profiles) {
    arr.push_back({{"class_tag", p.class_tag},
                   {"manufacturer", p.manufacturer},
                   {"part_number", p.part_number},
                   {"spd_version", p.spd_version},
                   {"garber_version", p.garber_version},
                   {"base_flip_prob", p.base_flip_prob},
                   {"column_bias", p.column_bias},
                   {"chip_bias", p.chip_bias},
                   {"locality_sigma", p.locality_sigma},
                   {"anti_column_mask", hex64(p.anti_column_mask)},
                   {"anti_region_rows", p.anti_region_rows},
                   {"anti_region_offset", p.anti_region_offset},
                   {"pattern_multiplier", p.pattern_multiplier},
                   {"weak_fraction", p.weak_fraction},
                   {"weak_multiplier", p.weak_multiplier},
                   {"row_noise_sigma", p.row_noise_sigma},
                   {"module_sigma", p.module_sigma}});
  }
  nlohmann::ordered_json j = {{"format_version", kProfileFormatVersion}, {"profiles", arr}};
  return j.dump(2) + "\n";
}

std::vector<ClassProfile> profiles_from_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("profile set is not valid JSON: ") + e.what(), e.byte);
  }
  std::vector<ClassProfile> out;
  try {
    if (j.at("format_version").get<int>() != kProfileFormatVersion) {
      throw FormatError("unsupported profile format version", 0);
    }
    for (const auto& e : j.at("profiles")) {
      ClassProfile p;
      p.class_tag = e.at("class_tag").get<std::int32_t>();
      p.manufacturer = e.at("manufacturer").get<std::string>();
      p.part_number = e.at("part_number").get<std::string>();
      p.spd_version = e.at("spd_version").get<std::string>();
      p.garber_version = e.at("garber_version").get<std::string>();
      p.base_flip_prob = e.at("base_flip_prob").get<double>();
      p.column_bias = e.at("column_bias").get<std::array<double, 64>>();
      p.chip_bias = e.at("chip_bias").get<std::array<double, 8>>();
      p.locality_sigma = e.at("locality_sigma").get<double>();
      p.anti_column_mask = std::stoull(e.at("anti_column_mask").get<std::string>(), nullptr, 16);
      p.anti_region_rows = e.at("anti_region_rows").get<std::uint32_t>();
      p.anti_region_offset = e.at("anti_region_offset").get<std::uint32_t>();
      p.pattern_multiplier = e.at("pattern_multiplier").get<std::array<double, 4>>();
      p.weak_fraction = e.at("weak_fraction").get<double>();
      p.weak_multiplier = e.at("weak_multiplier").get<double>();
      p.row_noise_sigma = e.at("row_noise_sigma").get<double>();
      p.module_sigma = e.at("module_sigma").get<double>();
      p.validate();
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed profile set: ") + e.what(), 0);
  } catch (const std::invalid_argument&) {
    throw FormatError("anti_column_mask is not a hex number", 0);
  }
  return out;
}

void save_profiles(std::span<const ClassProfile> profiles, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << profiles_to_json(profiles);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ClassProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return profiles_from_json(buf.str());
}

ModuleInstance::ModuleInstance(ClassProfile profile, std::uint64_t seed)
    : profile_(std::move(profile)), seed_(seed) {
  profile_.validate();
  Rng rng(derive_seed(seed_, {kModuleTag}));
  module_scale_ = rng.unit_lognormal(profile_.module_sigma);
}

bool ModuleInstance::is_anti_cell(std::uint32_t row, std::size_t bit) const {
  bool anti = (profile_.anti_column_mask >> (63 - bit)) & 1U;
  if (profile_.anti_region_rows > 0) {
    const std::uint64_t region =
        (static_cast<std::uint64_t>(row) + profile_.anti_region_offset) / profile_.anti_region_rows;
    anti ^= (region & 1U) != 0;
  }
  return anti;
}

BitMatrix ModuleInstance::weak_map(int bank, std::uint32_t row) const {
  Rng weak(derive_seed(seed_, {kWeakTag, static_cast<std::uint64_t>(bank), row}));
  BitMatrix m;
  for (std::uint32_t cell : sample_cells(weak, profile_.weak_fraction)) m.set(cell / 64, cell % 64, true);
  return m;
}

ModuleInstance realize_module(const ClassProfile& profile, std::uint64_t seed) {
  return ModuleInstance(profile, seed);
}

PageDump generate_page(const ModuleInstance& module, const std::string& module_id, int bank,
                       std::uint32_t row, DataPattern pattern, std::uint64_t read_seed) {
  if (bank < 0 || bank >= kBanksPerModule) throw DomainError("bank outside [0, 8)");
  const RowRealization rr = realize_row(module, bank, row);
  return PageDump(module_id, bank, row, pattern, read_back(module, rr, row, pattern, read_seed));
}

PageGroup generate_page_group(const ModuleInstance& module, const std::string& module_id,
                              int bank, std::uint32_t row, std::uint64_t read_seed) {
  if (bank < 0 || bank >= kBanksPerModule) throw DomainError("bank outside [0, 8)");
  const RowRealization rr = realize_row(module, bank, row);
  std::vector<PageDump> pages;
  pages.reserve(4);
  for (DataPattern p : kAllPatterns) {
    pages.emplace_back(module_id, bank, row, p, read_back(module, rr, row, p, read_seed));
  }
  return PageGroup(std::move(pages));
}

RowAddress corpus_row(std::size_t index) {
  return {static_cast<int>(index % kBanksPerModule),
          static_cast<std::uint32_t>(index / kBanksPerModule)};
}

std::uint64_t module_seed(std::uint64_t master_seed, std::int32_t class_tag,
                          std::size_t module_index) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(static_cast<std::uint32_t>(class_tag)),
                                   module_index});
}

std::uint64_t read_seed(std::uint64_t module_seed, int bank, std::uint32_t row) {
  return derive_seed(module_seed, {kReadTag, static_cast<std::uint64_t>(bank), row});
}

std::string corpus_module_id(std::int32_t class_tag, std::size_t module_index) {
  return "C" + std::to_string(class_tag) + "-M" + std::to_string(module_index + 1);
}

ModuleRecord module_record(const ClassProfile& profile, std::string module_id) {
  return {std::move(module_id), profile.manufacturer, profile.part_number, profile.spd_version,
          profile.garber_version, profile.class_tag};
}

std::vector<PageDump> generate_module_pages(const ModuleInstance& module,
                                           const std::string& module_id, std::size_t rows) {
  std::vector<std::vector<PageDump>> per_row(rows);
  parallel_for(rows, [&](std::size_t i) {
    const RowAddress a = corpus_row(i);
    const RowRealization rr = realize_row(module, a.bank, a.row);
    const std::uint64_t rs = read_seed(module.seed(), a.bank, a.row);
    for (DataPattern p : kAllPatterns) {
      per_row[i].emplace_back(module_id, a.bank, a.row, p, read_back(module, rr, a.row, p, rs));
    }
  });
  std::vector<PageDump> pages;
  pages.reserve(rows * 4);
  for (auto& r : per_row) {
    for (auto& p : r) pages.push_back(std::move(p));
  }
  return pages;
}

std::vector<CorpusEntry> generate_corpus(std::span<const ClassProfile> profiles,
                                         std::size_t modules_per_class,
                                         std::size_t rows_per_module, std::uint64_t master_seed,
                                         const std::filesystem::path& out_dir) {
  if (profiles.empty()) throw DomainError("generate_corpus: no profiles");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<CorpusEntry> entries;
  for (const auto& profile : profiles) {
    for (std::size_t k = 0; k < modules_per_class; ++k) {
      const ModuleInstance module =
          realize_module(profile, module_seed(master_seed, profile.class_tag, k));
      const std::string id = corpus_module_id(profile.class_tag, k);
      const auto pages = generate_module_pages(module, id, rows_per_module);
      CorpusEntry e{"class" + std::to_string(profile.class_tag) + "_module" +
                        std::to_string(k + 1) + ".dmp",
                    id, profile.class_tag};
      write_dump(pages, module_record(profile, id), out_dir / e.file);
      entries.push_back(std::move(e));
    }
  }
  std::ofstream manifest(out_dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!manifest) throw IoError("cannot write manifest in " + out_dir.string());
  manifest << "file,module_id,class_tag\n";
  for (const auto& e : entries) {
    manifest << e.file.generic_string() << ',' << e.module_id << ',' << e.class_tag << '\n';
  }
  if (!manifest) throw IoError("write failed for manifest in " + out_dir.string());
  return entries;
}

std::vector<CorpusEntry> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw IoError("cannot open " + manifest.string());
  std::string line;
  if (!std::getline(in, line) || line != "file,module_id,class_tag") {
    throw FormatError("manifest header must be 'file,module_id,class_tag'", 0);
  }
  std::vector<CorpusEntry> out;
  std::uint64_t offset = line.size() + 1;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      const auto a = line.find(','), b = line.rfind(',');
      if (a == std::string::npos || a == b) throw FormatError("bad manifest line", offset);
      try {
        out.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1),
                       static_cast<std::int32_t>(std::stol(line.substr(b + 1)))});
      } catch (const std::exception&) {
        throw FormatError("bad class tag in manifest", offset);
      }
    }
    offset += line.size() + 1;
  }
  return out;
}

}  // namespace dramorigin
