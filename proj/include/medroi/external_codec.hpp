#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "medroi/codec.hpp"

namespace medroi::codec::external {

// Raw frame handed to external encoders on stdin (and expected back from
// decoders on stdout): "MRF1", u16 width, u16 height, u8 bit_depth, then
// row-major little-endian samples of bit_depth bits (8 or 16).
inline constexpr std::string_view kFrameMagic = "MRF1";
inline constexpr std::size_t kFrameHeader = 9;

struct Frame {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> samples;
};

std::vector<std::uint8_t> make_frame(std::span<const float> samples, int width,
                                     int height, Dtype dtype);
Frame parse_frame(std::span<const std::uint8_t> bytes);

struct ProcessResult {
  int exit_code = 0;
  std::vector<std::uint8_t> out;
  std::string err;
};

// Runs `command` through /bin/sh, streaming `input` to its stdin while
// collecting stdout/stderr. Kills the child and throws ExternalCodecError
// when `timeout` elapses. Throws ExternalCodecError("... not found") when
// the program named by the first word cannot be located.
ProcessResult run_filter(const std::string& command,
                         std::span<const std::uint8_t> input,
                         std::chrono::milliseconds timeout);

// Caps concurrently running children across the whole process.
void set_max_concurrent_processes(int n);

struct ExternalCommand {
  // "{quality}" is replaced by the spec's quality. With use_temp_files the
  // command reads "{in}" and writes "{out}" instead of the standard streams.
  std::string encode;
  std::string decode;
  std::chrono::milliseconds timeout{60'000};
  bool use_temp_files = false;
};

class ExternalCodec final : public Codec {
 public:
  ExternalCodec(std::string id, ExternalCommand command);

  std::string_view id() const override { return id_; }
  QualityRange quality_range() const override { return {-32768, 32767, 0}; }
  bool supports_volume3d() const override { return false; }
  bool lossless() const override { return false; }

  std::vector<std::uint8_t> encode(std::span<const float> samples, Dims dims,
                                   Dtype dtype, int quality) const override;
  std::vector<float> decode(std::span<const std::uint8_t> bytes, Dims dims,
                            Dtype dtype, int quality) const override;

  const ExternalCommand& command() const { return command_; }

 private:
  std::vector<std::uint8_t> run(const std::string& command_template,
                                std::span<const std::uint8_t> input,
                                int quality) const;

  std::string id_;
  ExternalCommand command_;
};

// MEDROI_CODEC_<ID> gives the encoder command, MEDROI_CODEC_<ID>_DECODE the
// decoder, MEDROI_CODEC_<ID>_TIMEOUT_MS the per-frame timeout and
// MEDROI_CODEC_<ID>_TEMPFILES=1 selects the temp-file protocol. Ids are
// lower-cased.
std::vector<std::shared_ptr<const Codec>> codecs_from_environment();

std::string environment_key(std::string_view codec_id);

}  // namespace medroi::codec::external
