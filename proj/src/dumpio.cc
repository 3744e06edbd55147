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

#include "dramorigin/dumpio.h"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dramorigin/error.h"

namespace dramorigin {
namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    if (c < 0x80) extra = 0;
    else if ((c >> 5) == 0x6) extra = 1;
    else if ((c >> 4) == 0xE) extra = 2;
    else if ((c >> 3) == 0x1E) extra = 3;
    else return false;
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void str(const std::string& s, const char* field) {
    if (s.size() > 0xFFFF) throw DomainError(std::string(field) + " longer than 65535 bytes");
    if (!valid_utf8(s)) throw DomainError(std::string(field) + " is not valid UTF-8");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

bool same_memory_class(const ModuleRecord& a, const ModuleRecord& b) {
  return a.manufacturer == b.manufacturer && a.part_number == b.part_number &&
         a.spd_version == b.spd_version && a.garber_version == b.garber_version;
}

void check_class_tags(std::span<const ModuleRecord> records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      const bool same_tag = records[i].class_tag == records[j].class_tag;
      if (same_tag != same_memory_class(records[i], records[j])) {
        throw DomainError("modules " + records[i].module_id + " and " +
                          records[j].module_id +
                          (same_tag ? " share a class tag but differ in manufacturer, part "
                                      "number, SPD or Garber version"
                                    : " describe the same memory class under different tags"));
      }
    }
  }
}

std::vector<std::uint8_t> encode_dump(std::span<const PageDump> pages,
                                      const ModuleRecord& meta) {
  const Condition condition = pages.empty() ? Condition::kNVRT : pages.front().condition();
  for (const auto& p : pages) {
    if (p.module_id() != meta.module_id) {
      throw DomainError("page from module '" + p.module_id() +
                        "' cannot be written to dump of module '" + meta.module_id + "'");
    }
    if (p.condition() != condition) {
      throw DomainError("pages in one dump must share an operating condition");
    }
  }
  if (pages.size() > UINT32_MAX) throw DomainError("too many pages for one dump");

  ByteWriter w;
  w.buffer().reserve(64 + pages.size() * kDumpPageRecordBytes);
  w.bytes(kDumpMagic, sizeof kDumpMagic);
  w.u16(kDumpVersion);
  w.u8(kStripeConventionMsbPerBit);
  w.str(meta.module_id, "module_id");
  w.str(meta.manufacturer, "manufacturer");
  w.str(meta.part_number, "part_number");
  w.str(meta.spd_version, "spd_version");
  w.str(meta.garber_version, "garber_version");
  w.u32(static_cast<std::uint32_t>(meta.class_tag));
  w.u8(static_cast<std::uint8_t>(condition));
  w.u32(static_cast<std::uint32_t>(pages.size()));
  std::vector<std::uint8_t> payload(kPagePayloadBytes);
  for (const auto& p : pages) {
    w.u8(static_cast<std::uint8_t>(p.bank()));
    w.u32(p.row());
    w.u8(static_cast<std::uint8_t>(p.pattern()));
    p.read_back().to_bytes(payload);
    w.bytes(payload.data(), payload.size());
  }
  return std::move(w.buffer());
}

void write_dump(std::span<const PageDump> pages, const ModuleRecord& meta,
                const std::filesystem::path& path) {
  const auto bytes = encode_dump(pages, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

DumpReader::DumpReader(const std::filesystem::path& path) {
  auto f = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*f) throw IoError("cannot open " + path.string());
  in_ = std::move(f);
  read_header();
}

DumpReader::DumpReader(std::unique_ptr<std::istream> in) : in_(std::move(in)) {
  read_header();
}

DumpReader::~DumpReader() = default;
DumpReader::DumpReader(DumpReader&&) noexcept = default;
DumpReader& DumpReader::operator=(DumpReader&&) noexcept = default;

void DumpReader::read_exact(void* dst, std::size_t n, const char* what,
                            std::optional<std::uint64_t> page) {
  in_->read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  const auto got = static_cast<std::uint64_t>(in_->gcount());
  if (got != n) {
    throw FormatError(std::string("truncated ") + what, offset_ + got, page);
  }
  offset_ += n;
}

void DumpReader::read_header() {
  char magic[8];
  read_exact(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kDumpMagic, sizeof magic) != 0) {
    throw FormatError("bad magic, not a DRAMDMP1 dump", 0);
  }
  std::uint8_t b[4];
  read_exact(b, 2, "version");
  if (le16(b) != kDumpVersion) {
    throw FormatError("unsupported dump version " + std::to_string(le16(b)), 8);
  }
  read_exact(b, 1, "pattern convention");
  if (b[0] != kStripeConventionMsbPerBit) {
    throw FormatError("unknown pattern convention " + std::to_string(b[0]), 10);
  }
  auto read_str = [&](std::string& dst, const char* field) {
    read_exact(b, 2, field);
    const std::uint64_t at = offset_;
    dst.resize(le16(b));
    if (!dst.empty()) read_exact(dst.data(), dst.size(), field);
    if (!valid_utf8(dst)) throw FormatError(std::string(field) + " is not valid UTF-8", at);
  };
  read_str(record_.module_id, "module_id");
  read_str(record_.manufacturer, "manufacturer");
  read_str(record_.part_number, "part_number");
  read_str(record_.spd_version, "spd_version");
  read_str(record_.garber_version, "garber_version");
  read_exact(b, 4, "class tag");
  record_.class_tag = static_cast<std::int32_t>(le32(b));
  read_exact(b, 1, "condition");
  const auto cond = condition_from_id(b[0]);
  if (!cond) throw FormatError("unknown condition " + std::to_string(b[0]), offset_ - 1);
  condition_ = *cond;
  read_exact(b, 4, "page count");
  page_count_ = le32(b);
}

std::optional<PageDump> DumpReader::next() {
  if (finished_) return std::nullopt;
  if (pages_read_ == page_count_) {
    finished_ = true;
    if (in_->peek() != std::char_traits<char>::eof()) {
      throw FormatError("trailing bytes after last page", offset_);
    }
    return std::nullopt;
  }
  const std::uint64_t index = pages_read_;
  const std::uint64_t start = offset_;
  std::uint8_t head[6];
  read_exact(head, sizeof head, "page header", index);
  const int bank = head[0];
  if (bank >= kBanksPerModule) {
    throw FormatError("bank " + std::to_string(bank) + " out of range", start, index);
  }
  const std::uint32_t row = le32(head + 1);
  const auto pattern = pattern_from_id(head[5]);
  if (!pattern) {
    throw FormatError("unknown pattern id " + std::to_string(head[5]), start + 5, index);
  }
  std::vector<std::uint8_t> payload(kPagePayloadBytes);
  read_exact(payload.data(), payload.size(), "page payload", index);
  ++pages_read_;
  return PageDump(record_.module_id, bank, row, *pattern, BitMatrix::from_bytes(payload),
                  condition_);
}

namespace {
Dump drain(DumpReader& reader) {
  Dump d;
  d.record = reader.record();
  d.condition = reader.condition();
  d.pages.reserve(reader.page_count());
  while (auto p = reader.next()) d.pages.push_back(std::move(*p));
  return d;
}
}  // namespace

Dump decode_dump(std::span<const std::uint8_t> bytes) {
  auto in = std::make_unique<std::istringstream>(
      std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
      std::ios::binary);
  DumpReader reader(std::move(in));
  return drain(reader);
}

Dump read_dump(const std::filesystem::path& path) {
  DumpReader reader(path);
  return drain(reader);
}

// ---- feature table ----

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw DomainError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

void write_features(std::span<const FeatureRow> rows, std::ostream& out) {
  out << "module_id,bank,row";
  for (std::size_t i = 0; i < kFeatureCount; ++i) out << ',' << feature_column_name(i);
  out << '\n';
  for (const auto& r : rows) {
    if (r.module_id.find_first_of(",\"\r\n") != std::string::npos) {
      throw DomainError("module_id '" + r.module_id + "' cannot appear in a feature table");
    }
    out << r.module_id << ',' << r.bank << ',' << r.row;
    for (double v : r.features.values()) out << ',' << format_double(v);
    out << '\n';
  }
}

void export_features(std::span<const FeatureRow> rows, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_features(rows, buf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << buf.str();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<FeatureRow> read_features(std::istream& in) {
  std::string line;
  std::uint64_t line_no = 0;
  std::uint64_t offset = 0;
  auto fail = [&](const std::string& msg) -> FormatError {
    return FormatError("feature table line " + std::to_string(line_no) + ": " + msg, offset);
  };
  if (!std::getline(in, line)) throw FormatError("empty feature table", 0);
  ++line_no;
  {
    std::ostringstream expect;
    write_features({}, expect);
    std::string header = expect.str();
    header.pop_back();
    if (line != header) throw fail("unexpected header");
  }
  offset += line.size() + 1;
  std::vector<FeatureRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      offset += 1;
      continue;
    }
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 3 + kFeatureCount) {
      throw fail("expected " + std::to_string(3 + kFeatureCount) + " fields, got " +
                 std::to_string(cells.size()));
    }
    FeatureRow r;
    r.module_id = std::string(cells[0]);
    try {
      const double bank = parse_double(cells[1]);
      const double row = parse_double(cells[2]);
      if (bank < 0 || bank >= kBanksPerModule || bank != static_cast<int>(bank) || row < 0 ||
          row > UINT32_MAX || row != static_cast<double>(static_cast<std::uint32_t>(row))) {
        throw fail("bad bank/row");
      }
      r.bank = static_cast<int>(bank);
      r.row = static_cast<std::uint32_t>(row);
      for (std::size_t i = 0; i < kFeatureCount; ++i) r.features[i] = parse_double(cells[3 + i]);
    } catch (const DomainError& e) {
      throw fail(e.what());
    }
    rows.push_back(std::move(r));
    offset += line.size() + 1;
  }
  return rows;
}

std::vector<FeatureRow> import_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_features(in);
}

}  // namespace dramorigin
