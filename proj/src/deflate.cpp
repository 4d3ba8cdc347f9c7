#include "medroi/deflate.hpp"

#include <zlib.h>

#include <string>

#include "medroi/error.hpp"

namespace medroi::deflate {

namespace {

constexpr int kRawWindowBits = -15;
constexpr int kGzipWindowBits = 15 + 16;

}  // namespace

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input,
                                   int level) {
  z_stream zs{};
  if (deflateInit2(&zs, level, Z_DEFLATED, kRawWindowBits, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::EncodeError, "deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, input.size()));
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = ::deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    throw Error(ErrorCode::EncodeError, "deflate did not finish");
  }
  out.resize(produced);
  return out;
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input,
                                     std::size_t expected_size) {
  z_stream zs{};
  if (inflateInit2(&zs, kRawWindowBits) != Z_OK) {
    throw Error(ErrorCode::DecodeError, "inflateInit2 failed");
  }
  // One spare byte so an over-long stream is detected rather than clipped.
  std::vector<std::uint8_t> out(expected_size + 1);
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    throw Error(ErrorCode::DecodeError, "corrupt or truncated deflate stream");
  }
  if (produced != expected_size) {
    throw Error(ErrorCode::DecodeError,
                "inflated " + std::to_string(produced) + " bytes, expected " +
                    std::to_string(expected_size));
  }
  out.resize(expected_size);
  return out;
}

bool is_gzip(std::span<const std::uint8_t> data) {
  return data.size() >= 2 && data[0] == 0x1F && data[1] == 0x8B;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> input) {
  z_stream zs{};
  if (inflateInit2(&zs, kGzipWindowBits) != Z_OK) {
    throw Error(ErrorCode::UnsupportedFormat, "inflateInit2 failed");
  }
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  int rc = Z_OK;
  while (true) {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    out.insert(out.end(), chunk.data(),
               chunk.data() + (chunk.size() - zs.avail_out));
    if (rc == Z_STREAM_END) {
      // Concatenated gzip members are legal.
      if (zs.avail_in == 0) break;
      if (inflateReset(&zs) != Z_OK) break;
      continue;
    }
    if (rc != Z_OK) break;
    if (zs.avail_in == 0 && zs.avail_out != 0) {
      rc = Z_DATA_ERROR;
      break;
    }
  }
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    throw Error(ErrorCode::UnsupportedFormat, "malformed gzip stream");
  }
  return out;
}

}  // namespace medroi::deflate
