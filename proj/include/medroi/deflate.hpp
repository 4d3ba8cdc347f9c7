#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace medroi::deflate {

// Raw DEFLATE (RFC 1951) streams, no zlib or gzip wrapper.
std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input,
                                   int level);

// Inflates a raw DEFLATE stream that must expand to exactly
// `expected_size` bytes. Throws DecodeError otherwise.
std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input,
                                     std::size_t expected_size);

bool is_gzip(std::span<const std::uint8_t> data);

// RFC 1952 member(s) to plain bytes. Throws UnsupportedFormat on a
// malformed stream.
std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> input);

}  // namespace medroi::deflate
