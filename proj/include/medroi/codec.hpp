#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medroi/types.hpp"

namespace medroi::codec {

inline constexpr std::size_t kMaxIdLength = 16;

struct CodecSpec {
  std::string id;
  int quality = 0;
  bool slice2d = true;
  bool volume3d = true;
  bool lossless = false;
};

struct QualityRange {
  int min = 0;
  int max = 0;
  int fallback = 0;
  bool contains(int q) const { return q >= min && q <= max; }
};

struct EncodedPayload {
  std::vector<std::uint8_t> bytes;
  Dims source_dims;
  int bit_depth = 0;
  Dtype dtype = Dtype::F32;
};

// A codec compresses one block of samples (a slice has d = 1). Codecs hold
// no mutable state, so one instance serves concurrent calls.
class Codec {
 public:
  virtual ~Codec() = default;

  virtual std::string_view id() const = 0;
  virtual QualityRange quality_range() const = 0;
  virtual bool supports_slice2d() const { return true; }
  virtual bool supports_volume3d() const { return true; }
  virtual bool lossless() const = 0;

  virtual std::vector<std::uint8_t> encode(std::span<const float> samples,
                                           Dims dims, Dtype dtype,
                                           int quality) const = 0;
  virtual std::vector<float> decode(std::span<const std::uint8_t> bytes,
                                    Dims dims, Dtype dtype,
                                    int quality) const = 0;
};

// Identity: samples packed little-endian in the source dtype.
class RawCodec final : public Codec {
 public:
  std::string_view id() const override { return "raw"; }
  QualityRange quality_range() const override { return {0, 0, 0}; }
  bool lossless() const override { return true; }
  std::vector<std::uint8_t> encode(std::span<const float> samples, Dims dims,
                                   Dtype dtype, int quality) const override;
  std::vector<float> decode(std::span<const std::uint8_t> bytes, Dims dims,
                            Dtype dtype, int quality) const override;
};

// Raw DEFLATE over the packed sample stream; quality is the zlib level.
class DeflateCodec final : public Codec {
 public:
  std::string_view id() const override { return "deflate"; }
  QualityRange quality_range() const override { return {1, 9, 6}; }
  bool lossless() const override { return true; }
  std::vector<std::uint8_t> encode(std::span<const float> samples, Dims dims,
                                   Dtype dtype, int quality) const override;
  std::vector<float> decode(std::span<const std::uint8_t> bytes, Dims dims,
                            Dtype dtype, int quality) const override;
};

// Uniform scalar quantiser to q bits over the block's [min, max], indices
// deflated. Payload: "MQ01", u8 q, f32 min, f32 max, deflate(indices).
// Reconstruction is the bin midpoint, so |in - out| <= (max - min) / 2^(q+1)
// before rounding to an integer dtype.
class QuantCodec final : public Codec {
 public:
  static constexpr int kDeflateLevel = 6;

  std::string_view id() const override { return "quant"; }
  QualityRange quality_range() const override { return {1, 8, 4}; }
  bool lossless() const override { return false; }
  std::vector<std::uint8_t> encode(std::span<const float> samples, Dims dims,
                                   Dtype dtype, int quality) const override;
  std::vector<float> decode(std::span<const std::uint8_t> bytes, Dims dims,
                            Dtype dtype, int quality) const override;
};

class CodecRegistry {
 public:
  // raw, deflate and quant.
  static CodecRegistry with_builtins();

  void add(std::shared_ptr<const Codec> codec);
  // Registers an external codec for every MEDROI_CODEC_<ID> variable.
  void add_from_environment();

  std::shared_ptr<const Codec> find(std::string_view id) const;
  // Throws UnknownCodec naming the registered ids.
  const Codec& resolve(std::string_view id) const;
  std::vector<std::string> ids() const;

  // Validated spec; quality defaults to the codec's fallback.
  CodecSpec spec(std::string_view id, std::optional<int> quality = {}) const;

 private:
  std::map<std::string, std::shared_ptr<const Codec>, std::less<>> codecs_;
};

// Built-ins plus the environment, constructed on first use.
const CodecRegistry& default_registry();

EncodedPayload encode_slice(const CodecRegistry& registry,
                            const CodecSpec& spec, const Slice& slice);
Slice decode_slice(const CodecRegistry& registry, const CodecSpec& spec,
                   const EncodedPayload& payload);
EncodedPayload encode_volume(const CodecRegistry& registry,
                             const CodecSpec& spec, const Volume& volume);
Volume decode_volume(const CodecRegistry& registry, const CodecSpec& spec,
                     const EncodedPayload& payload);

}  // namespace medroi::codec
