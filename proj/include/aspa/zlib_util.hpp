#ifndef ASPA_ZLIB_UTIL_HPP
#define ASPA_ZLIB_UTIL_HPP

#include <cstdint>
#include <span>

#include <zlib.h>

#include "aspa/bytes.hpp"
#include "aspa/error.hpp"

namespace aspa {

/// Raw-deflate (no zlib header), fixed level so output is deterministic.
inline Bytes deflate_bytes(std::span<const std::uint8_t> input, int level = 9) {
  z_stream zs{};
  if (deflateInit2(&zs, level, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw error(errc::io_error, "deflate initialization failed");
  Bytes out(deflateBound(&zs, static_cast<uLong>(input.size())));
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw error(errc::io_error, "deflate failed");
  out.resize(zs.total_out);
  return out;
}

/// Inverse of deflate_bytes. `truncation` selects the error to raise for a
/// corrupt or short stream.
inline Bytes inflate_bytes(std::span<const std::uint8_t> input,
                           errc truncation = errc::truncated_input) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw error(errc::io_error, "inflate initialization failed");
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  Bytes out;
  Bytes chunk(64 * 1024);
  int rc = Z_OK;
  do {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw parse_error(truncation, zs.total_in, "compressed stream is corrupt or truncated");
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
  } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  bool complete = rc == Z_STREAM_END;
  inflateEnd(&zs);
  if (!complete)
    throw parse_error(truncation, input.size(), "compressed stream ended early");
  return out;
}

}  // namespace aspa

#endif  // ASPA_ZLIB_UTIL_HPP
