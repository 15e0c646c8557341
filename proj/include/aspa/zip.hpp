#ifndef ASPA_ZIP_HPP
#define ASPA_ZIP_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "aspa/bytes.hpp"
#include "aspa/error.hpp"
#include "aspa/zlib_util.hpp"

namespace aspa {

/// One archive entry, stripped of container metadata. Timestamps, CRCs,
/// compression method and entry order are read-side artifacts and never
/// reach callers.
struct ZipEntry {
  std::string name;
  Bytes data;
};

namespace detail {

class LeReader {
 public:
  LeReader(std::span<const std::uint8_t> data, std::size_t pos) : data_(data), pos_(pos) {}

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | data_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) |
                      static_cast<std::uint32_t>(data_[pos_ + 1]) << 8 |
                      static_cast<std::uint32_t>(data_[pos_ + 2]) << 16 |
                      static_cast<std::uint32_t>(data_[pos_ + 3]) << 24;
    pos_ += 4;
    return v;
  }

  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw archive_error(errc::bad_zip_container, "", "archive structure extends past the input");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_;
};

inline constexpr std::uint32_t kLocalSig = 0x04034B50;
inline constexpr std::uint32_t kCentralSig = 0x02014B50;
inline constexpr std::uint32_t kEndSig = 0x06054B50;

}  // namespace detail

/// Reads a ZIP container through its central directory. Entry metadata is
/// discarded; stored CRCs are not even inspected. Directory placeholders
/// (names ending in '/') are dropped.
inline std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> data) {
  using namespace detail;
  if (data.size() < 22) throw archive_error(errc::bad_zip_container, "", "too short for an archive");
  // End-of-central-directory: last 22-byte record, possibly preceding a comment.
  std::size_t eocd = std::string::npos;
  std::size_t scan_limit = data.size() >= 22 + 65535 ? data.size() - 22 - 65535 : 0;
  for (std::size_t i = data.size() - 22 + 1; i-- > scan_limit;) {
    if (data[i] == 0x50 && data[i + 1] == 0x4B && data[i + 2] == 0x05 && data[i + 3] == 0x06) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos)
    throw archive_error(errc::bad_zip_container, "", "no end-of-central-directory record");

  LeReader end(data, eocd + 4);
  end.skip(2 + 2 + 2);  // disk numbers, entries on this disk
  std::uint16_t entry_count = end.u16();
  std::uint32_t cd_size = end.u32();
  std::uint32_t cd_offset = end.u32();
  if (cd_offset + static_cast<std::uint64_t>(cd_size) > data.size())
    throw archive_error(errc::bad_zip_container, "", "central directory out of bounds");

  std::vector<ZipEntry> entries;
  LeReader cd(data, cd_offset);
  for (std::uint16_t i = 0; i < entry_count; ++i) {
    if (cd.u32() != kCentralSig)
      throw archive_error(errc::bad_zip_container, "", "bad central directory entry signature");
    cd.skip(2 + 2 + 2);  // version made by, version needed, flags
    std::uint16_t method = cd.u16();
    cd.skip(2 + 2 + 4);  // time, date, crc (ignored)
    std::uint32_t csize = cd.u32();
    std::uint32_t usize = cd.u32();
    std::uint16_t name_len = cd.u16();
    std::uint16_t extra_len = cd.u16();
    std::uint16_t comment_len = cd.u16();
    cd.skip(2 + 2 + 4);  // disk start, internal attrs, external attrs
    std::uint32_t local_offset = cd.u32();
    std::string name = cd.str(name_len);
    cd.skip(extra_len);
    cd.skip(comment_len);

    if (!name.empty() && name.back() == '/' && usize == 0) continue;  // directory placeholder

    LeReader local(data, local_offset);
    if (local.u32() != kLocalSig)
      throw archive_error(errc::bad_zip_container, name, "bad local header signature");
    local.skip(2 + 2 + 2 + 2 + 2 + 4 + 4 + 4);  // up to and including sizes
    std::uint16_t lname_len = local.u16();
    std::uint16_t lextra_len = local.u16();
    local.skip(lname_len);
    local.skip(lextra_len);
    std::size_t data_at = local.pos();
    if (data_at + static_cast<std::uint64_t>(csize) > data.size())
      throw archive_error(errc::bad_zip_container, name, "entry data out of bounds");
    std::span<const std::uint8_t> payload = data.subspan(data_at, csize);

    ZipEntry entry;
    entry.name = std::move(name);
    if (method == 0) {
      entry.data.assign(payload.begin(), payload.end());
    } else if (method == 8) {
      try {
        entry.data = inflate_bytes(payload);
      } catch (const error&) {
        throw archive_error(errc::bad_zip_container, entry.name, "corrupt deflate stream");
      }
      if (entry.data.size() != usize)
        throw archive_error(errc::bad_zip_container, entry.name, "inflated size mismatch");
    } else {
      throw archive_error(errc::bad_zip_container, entry.name,
                          "unsupported compression method " + std::to_string(method));
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

inline std::vector<ZipEntry> read_zip(const Bytes& data) {
  return read_zip(std::span<const std::uint8_t>(data.data(), data.size()));
}

/// Writes entries as a ZIP container, byte-deterministically: names sorted,
/// fixed 1980-01-01 timestamp, deflate exactly when it shrinks the entry.
inline Bytes write_zip(std::vector<ZipEntry> entries) {
  if (entries.size() > 65535)
    throw archive_error(errc::capacity_overflow, "", "more than 65535 archive entries");
  std::sort(entries.begin(), entries.end(),
            [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });

  constexpr std::uint16_t kDosTime = 0x0000;
  constexpr std::uint16_t kDosDate = 0x0021;  // 1980-01-01

  ByteWriter out;
  auto le16 = [&out](std::uint16_t v) {
    out.u1(static_cast<std::uint8_t>(v));
    out.u1(static_cast<std::uint8_t>(v >> 8));
  };
  auto le32 = [&out](std::uint32_t v) {
    out.u1(static_cast<std::uint8_t>(v));
    out.u1(static_cast<std::uint8_t>(v >> 8));
    out.u1(static_cast<std::uint8_t>(v >> 16));
    out.u1(static_cast<std::uint8_t>(v >> 24));
  };

  struct CentralRecord {
    const ZipEntry* entry;
    std::uint16_t method;
    std::uint32_t crc;
    std::uint32_t csize;
    std::uint32_t offset;
  };
  std::vector<CentralRecord> central;
  central.reserve(entries.size());

  for (const auto& e : entries) {
    if (e.name.size() > 65535)
      throw archive_error(errc::capacity_overflow, e.name, "entry name longer than 65535 bytes");
    Bytes deflated = deflate_bytes(e.data);
    bool use_deflate = deflated.size() < e.data.size();
    const Bytes& payload = use_deflate ? deflated : e.data;
    CentralRecord rec;
    rec.entry = &e;
    rec.method = use_deflate ? 8 : 0;
    rec.crc = static_cast<std::uint32_t>(
        crc32(0L, e.data.empty() ? Z_NULL : e.data.data(), static_cast<uInt>(e.data.size())));
    rec.csize = static_cast<std::uint32_t>(payload.size());
    rec.offset = static_cast<std::uint32_t>(out.size());

    le32(detail::kLocalSig);
    le16(20);  // version needed
    le16(0);   // flags
    le16(rec.method);
    le16(kDosTime);
    le16(kDosDate);
    le32(rec.crc);
    le32(rec.csize);
    le32(static_cast<std::uint32_t>(e.data.size()));
    le16(static_cast<std::uint16_t>(e.name.size()));
    le16(0);  // extra
    out.str(e.name);
    out.bytes(payload);
    central.push_back(rec);
  }

  std::size_t cd_start = out.size();
  for (const auto& rec : central) {
    le32(detail::kCentralSig);
    le16(20);  // version made by
    le16(20);  // version needed
    le16(0);   // flags
    le16(rec.method);
    le16(kDosTime);
    le16(kDosDate);
    le32(rec.crc);
    le32(rec.csize);
    le32(static_cast<std::uint32_t>(rec.entry->data.size()));
    le16(static_cast<std::uint16_t>(rec.entry->name.size()));
    le16(0);  // extra
    le16(0);  // comment
    le16(0);  // disk start
    le16(0);  // internal attrs
    le32(0);  // external attrs
    le32(rec.offset);
    out.str(rec.entry->name);
  }
  std::size_t cd_size = out.size() - cd_start;

  le32(detail::kEndSig);
  le16(0);  // disk
  le16(0);  // cd disk
  le16(static_cast<std::uint16_t>(central.size()));
  le16(static_cast<std::uint16_t>(central.size()));
  le32(static_cast<std::uint32_t>(cd_size));
  le32(static_cast<std::uint32_t>(cd_start));
  le16(0);  // comment length
  return out.take();
}

}  // namespace aspa

#endif  // ASPA_ZIP_HPP
