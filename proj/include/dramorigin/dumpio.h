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

#ifndef DRAMORIGIN_DUMPIO_H_
#define DRAMORIGIN_DUMPIO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dramorigin/features.h"
#include "dramorigin/pagedata.h"

namespace dramorigin {

// Dump file layout (all integers little-endian):
//
//   "DRAMDMP1"          8-byte magic
//   u16 version         = 1
//   u8  convention      = 1 (stripe 1010.. per bit within word, bit 0 = MSB)
//   5 x (u16 len, bytes) module_id, manufacturer, part_number, spd_version,
//                        garber_version (UTF-8)
//   i32 class_tag
//   u8  condition       0=NVRT 1=HVRT 2=LVRT 3=NVHT
//   u32 page_count
//   page_count x { u8 bank, u32 row, u8 pattern (1..4), 8192-byte payload }
//
// Payload words are stored big-endian so bit 0 of word 0 is the first bit.
inline constexpr char kDumpMagic[8] = {'D', 'R', 'A', 'M', 'D', 'M', 'P', '1'};
inline constexpr std::uint16_t kDumpVersion = 1;
inline constexpr std::uint8_t kStripeConventionMsbPerBit = 1;
inline constexpr std::size_t kDumpPageRecordBytes = 1 + 4 + 1 + kPagePayloadBytes;

struct ModuleRecord {
  std::string module_id;
  std::string manufacturer;
  std::string part_number;
  std::string spd_version;
  std::string garber_version;
  std::int32_t class_tag = 0;

  bool operator==(const ModuleRecord&) const = default;
};

/// True when two records describe the same memory class: manufacturer,
/// part number, SPD and Garber versions all match.
bool same_memory_class(const ModuleRecord& a, const ModuleRecord& b);

/// Throws DomainError unless records share a class_tag exactly when they
/// describe the same memory class.
void check_class_tags(std::span<const ModuleRecord> records);

struct Dump {
  ModuleRecord record;
  Condition condition = Condition::kNVRT;
  std::vector<PageDump> pages;
};

/// Serializes pages to an in-memory dump image. All pages must carry
/// meta.module_id and share one condition; otherwise DomainError.
std::vector<std::uint8_t> encode_dump(std::span<const PageDump> pages,
                                      const ModuleRecord& meta);
void write_dump(std::span<const PageDump> pages, const ModuleRecord& meta,
                const std::filesystem::path& path);

/// Streaming reader: the header is validated on construction, pages are
/// decoded one at a time by next(). Every malformed input raises
/// FormatError; the reader never yields a silent partial result.
class DumpReader {
 public:
  explicit DumpReader(const std::filesystem::path& path);
  explicit DumpReader(std::unique_ptr<std::istream> in);
  ~DumpReader();
  DumpReader(DumpReader&&) noexcept;
  DumpReader& operator=(DumpReader&&) noexcept;

  const ModuleRecord& record() const { return record_; }
  Condition condition() const { return condition_; }
  std::uint32_t page_count() const { return page_count_; }

  /// Next page, or nullopt after the last one (at which point trailing
  /// bytes are rejected).
  std::optional<PageDump> next();

 private:
  void read_header();
  void read_exact(void* dst, std::size_t n, const char* what,
                  std::optional<std::uint64_t> page = std::nullopt);

  std::unique_ptr<std::istream> in_;
  std::uint64_t offset_ = 0;
  ModuleRecord record_;
  Condition condition_ = Condition::kNVRT;
  std::uint32_t page_count_ = 0;
  std::uint32_t pages_read_ = 0;
  bool finished_ = false;
};

Dump decode_dump(std::span<const std::uint8_t> bytes);
Dump read_dump(const std::filesystem::path& path);

// Feature table: comma-separated, header "module_id,bank,row,f01,...,f26",
// one page group per line, shortest round-trip decimal formatting.
struct FeatureRow {
  std::string module_id;
  int bank = 0;
  std::uint32_t row = 0;
  FeatureVector features;

  bool operator==(const FeatureRow&) const = default;
};

void write_features(std::span<const FeatureRow> rows, std::ostream& out);
void export_features(std::span<const FeatureRow> rows, const std::filesystem::path& path);
std::vector<FeatureRow> read_features(std::istream& in);
std::vector<FeatureRow> import_features(const std::filesystem::path& path);

/// Locale-independent shortest representation that parses back exactly.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace dramorigin

#endif  // DRAMORIGIN_DUMPIO_H_
