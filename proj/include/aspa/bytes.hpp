#ifndef ASPA_BYTES_HPP
#define ASPA_BYTES_HPP

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aspa/error.hpp"

namespace aspa {

using Bytes = std::vector<std::uint8_t>;

/// Big-endian cursor over a byte buffer. All reads are bounds-checked; an
/// out-of-range read throws the configured truncation error with the offset
/// where data ran out.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, errc truncation = errc::truncated_input)
      : data_(data), truncation_(truncation) {}

  std::size_t pos() const noexcept { return pos_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }

  void seek(std::size_t pos) {
    if (pos > data_.size()) throw parse_error(truncation_, pos, "seek past end of input");
    pos_ = pos;
  }

  std::uint8_t u1() {
    need(1);
    return data_[pos_++];
  }

  std::uint16_t u2() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }

  std::uint32_t u4() {
    need(4);
    std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) << 24 |
                      static_cast<std::uint32_t>(data_[pos_ + 1]) << 16 |
                      static_cast<std::uint32_t>(data_[pos_ + 2]) << 8 |
                      static_cast<std::uint32_t>(data_[pos_ + 3]);
    pos_ += 4;
    return v;
  }

  std::uint64_t u8() {
    std::uint64_t hi = u4();
    return hi << 32 | u4();
  }

  std::int8_t s1() { return static_cast<std::int8_t>(u1()); }
  std::int16_t s2() { return static_cast<std::int16_t>(u2()); }
  std::int32_t s4() { return static_cast<std::int32_t>(u4()); }

  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::string str(std::size_t n) {
    auto b = bytes(n);
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
  }

  /// Unsigned LEB128, at most 64 bits.
  std::uint64_t varint() {
    std::uint64_t value = 0;
    int shift = 0;
    for (int i = 0; i < 10; ++i) {
      std::uint8_t byte = u1();
      value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if ((byte & 0x80) == 0) {
        if (i == 9 && (byte & 0x7e) != 0)
          throw parse_error(errc::bad_varint, pos_ - 1, "varint exceeds 64 bits");
        return value;
      }
      shift += 7;
    }
    throw parse_error(errc::bad_varint, pos_, "unterminated varint");
  }

  std::int64_t svarint() {
    std::uint64_t raw = varint();
    return static_cast<std::int64_t>(raw >> 1) ^ -static_cast<std::int64_t>(raw & 1);
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw parse_error(truncation_, data_.size(), "unexpected end of input");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  errc truncation_;
};

/// Big-endian append-only writer with backfill support for length fields.
class ByteWriter {
 public:
  const Bytes& data() const noexcept { return buf_; }
  Bytes take() { return std::move(buf_); }
  std::size_t size() const noexcept { return buf_.size(); }

  void u1(std::uint8_t v) { buf_.push_back(v); }

  void u2(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
  }

  void u4(std::uint32_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 24));
    buf_.push_back(static_cast<std::uint8_t>(v >> 16));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
  }

  void u8(std::uint64_t v) {
    u4(static_cast<std::uint32_t>(v >> 32));
    u4(static_cast<std::uint32_t>(v));
  }

  void s1(std::int8_t v) { u1(static_cast<std::uint8_t>(v)); }
  void s2(std::int16_t v) { u2(static_cast<std::uint16_t>(v)); }
  void s4(std::int32_t v) { u4(static_cast<std::uint32_t>(v)); }

  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  void str(std::string_view s) {
    buf_.insert(buf_.end(), reinterpret_cast<const std::uint8_t*>(s.data()),
                reinterpret_cast<const std::uint8_t*>(s.data()) + s.size());
  }

  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      buf_.push_back(static_cast<std::uint8_t>(v) | 0x80);
      v >>= 7;
    }
    buf_.push_back(static_cast<std::uint8_t>(v));
  }

  void svarint(std::int64_t v) {
    varint((static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63));
  }

  /// Reserves a u2/u4 slot and returns its position for patch_u2/patch_u4.
  std::size_t mark_u2() {
    std::size_t at = buf_.size();
    u2(0);
    return at;
  }

  std::size_t mark_u4() {
    std::size_t at = buf_.size();
    u4(0);
    return at;
  }

  void patch_u2(std::size_t at, std::uint16_t v) {
    buf_[at] = static_cast<std::uint8_t>(v >> 8);
    buf_[at + 1] = static_cast<std::uint8_t>(v);
  }

  void patch_u4(std::size_t at, std::uint32_t v) {
    buf_[at] = static_cast<std::uint8_t>(v >> 24);
    buf_[at + 1] = static_cast<std::uint8_t>(v >> 16);
    buf_[at + 2] = static_cast<std::uint8_t>(v >> 8);
    buf_[at + 3] = static_cast<std::uint8_t>(v);
  }

 private:
  Bytes buf_;
};

}  // namespace aspa

#endif  // ASPA_BYTES_HPP
