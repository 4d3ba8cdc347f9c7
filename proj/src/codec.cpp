#include "medroi/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medroi/byte_io.hpp"
#include "medroi/deflate.hpp"
#include "medroi/error.hpp"
#include "medroi/external_codec.hpp"

namespace medroi::codec {

namespace {

constexpr std::string_view kQuantMagic = "MQ01";
constexpr std::size_t kQuantHeader = 4 + 1 + 4 + 4;

std::size_t packed_size(Dims dims, Dtype dtype) {
  return dims.voxels() * static_cast<std::size_t>(bytes_per_sample(dtype));
}

}  // namespace

std::vector<std::uint8_t> RawCodec::encode(std::span<const float> samples,
                                           Dims, Dtype dtype, int) const {
  return pack_samples(samples, dtype);
}

std::vector<float> RawCodec::decode(std::span<const std::uint8_t> bytes,
                                    Dims dims, Dtype dtype, int) const {
  if (bytes.size() != packed_size(dims, dtype)) {
    throw Error(ErrorCode::DecodeError, "raw payload length mismatch");
  }
  return unpack_samples(bytes, dtype);
}

std::vector<std::uint8_t> DeflateCodec::encode(std::span<const float> samples,
                                               Dims, Dtype dtype,
                                               int quality) const {
  return deflate::compress(pack_samples(samples, dtype), quality);
}

std::vector<float> DeflateCodec::decode(std::span<const std::uint8_t> bytes,
                                        Dims dims, Dtype dtype, int) const {
  return unpack_samples(deflate::decompress(bytes, packed_size(dims, dtype)),
                        dtype);
}

std::vector<std::uint8_t> QuantCodec::encode(std::span<const float> samples,
                                             Dims, Dtype, int quality) const {
  float lo = std::numeric_limits<float>::max();
  float hi = std::numeric_limits<float>::lowest();
  for (float v : samples) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (samples.empty()) lo = hi = 0.0f;

  const int levels = 1 << quality;
  const double range = static_cast<double>(hi) - static_cast<double>(lo);
  std::vector<std::uint8_t> indices(samples.size(), 0);
  if (range > 0.0) {
    const double per_unit = levels / range;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto bin = static_cast<int>(
          std::floor((static_cast<double>(samples[i]) - lo) * per_unit));
      indices[i] = static_cast<std::uint8_t>(std::clamp(bin, 0, levels - 1));
    }
  }

  ByteWriter w;
  w.text(kQuantMagic);
  w.u8(static_cast<std::uint8_t>(quality));
  w.f32(lo);
  w.f32(hi);
  w.bytes(deflate::compress(indices, kDeflateLevel));
  return w.take();
}

std::vector<float> QuantCodec::decode(std::span<const std::uint8_t> bytes,
                                      Dims dims, Dtype dtype, int) const {
  if (bytes.size() < kQuantHeader ||
      !std::equal(kQuantMagic.begin(), kQuantMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::DecodeError, "missing MQ01 quantiser header");
  }
  ByteReader r(bytes.subspan(4));
  std::uint8_t q = 0;
  float lo = 0.0f;
  float hi = 0.0f;
  r.u8(q);
  r.f32(lo);
  r.f32(hi);
  if (q < 1 || q > 8 || !(lo <= hi)) {
    throw Error(ErrorCode::DecodeError, "invalid quantiser header");
  }
  const auto indices =
      deflate::decompress(bytes.subspan(kQuantHeader), dims.voxels());

  const int levels = 1 << q;
  const double range = static_cast<double>(hi) - static_cast<double>(lo);
  const double step = range / levels;
  std::vector<float> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= levels) {
      throw Error(ErrorCode::DecodeError, "quantiser index out of range");
    }
    const double value =
        range > 0.0 ? lo + (indices[i] + 0.5) * step : static_cast<double>(lo);
    out[i] = to_representable(value, dtype);
  }
  return out;
}

CodecRegistry CodecRegistry::with_builtins() {
  CodecRegistry r;
  r.add(std::make_shared<RawCodec>());
  r.add(std::make_shared<DeflateCodec>());
  r.add(std::make_shared<QuantCodec>());
  return r;
}

void CodecRegistry::add(std::shared_ptr<const Codec> codec) {
  const std::string id(codec->id());
  if (id.empty() || id.size() > kMaxIdLength ||
      !std::all_of(id.begin(), id.end(),
                   [](unsigned char c) { return c > 0x20 && c < 0x7F; })) {
    throw Error(ErrorCode::InvalidArgument,
                "codec id must be 1-16 printable ASCII bytes: '" + id + "'");
  }
  codecs_[id] = std::move(codec);
}

void CodecRegistry::add_from_environment() {
  for (auto& codec : external::codecs_from_environment()) add(std::move(codec));
}

std::shared_ptr<const Codec> CodecRegistry::find(std::string_view id) const {
  const auto it = codecs_.find(id);
  return it == codecs_.end() ? nullptr : it->second;
}

const Codec& CodecRegistry::resolve(std::string_view id) const {
  const auto it = codecs_.find(id);
  if (it == codecs_.end()) {
    std::string known;
    for (const auto& name : ids()) known += (known.empty() ? "" : ", ") + name;
    throw Error(ErrorCode::UnknownCodec, "unknown codec '" + std::string(id) +
                                             "'; registered: " + known);
  }
  return *it->second;
}

std::vector<std::string> CodecRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : codecs_) out.push_back(id);
  return out;
}

CodecSpec CodecRegistry::spec(std::string_view id,
                              std::optional<int> quality) const {
  const Codec& c = resolve(id);
  const auto range = c.quality_range();
  const int q = quality.value_or(range.fallback);
  if (!range.contains(q)) {
    throw Error(ErrorCode::InvalidArgument,
                "quality " + std::to_string(q) + " outside [" +
                    std::to_string(range.min) + ", " +
                    std::to_string(range.max) + "] for codec " +
                    std::string(id));
  }
  return {std::string(id), q, c.supports_slice2d(), c.supports_volume3d(),
          c.lossless()};
}

const CodecRegistry& default_registry() {
  static const CodecRegistry registry = [] {
    auto r = CodecRegistry::with_builtins();
    r.add_from_environment();
    return r;
  }();
  return registry;
}

namespace {

EncodedPayload encode_block(const Codec& c, const CodecSpec& spec,
                            std::span<const float> samples, Dims dims,
                            Dtype dtype) {
  EncodedPayload p;
  p.source_dims = dims;
  p.dtype = dtype;
  p.bit_depth = bits_per_sample(dtype);
  try {
    p.bytes = c.encode(samples, dims, dtype, spec.quality);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ExternalCodecError) throw;
    throw Error(ErrorCode::EncodeError, spec.id + ": " + e.what());
  }
  return p;
}

std::vector<float> decode_block(const Codec& c, const CodecSpec& spec,
                                const EncodedPayload& payload) {
  std::vector<float> samples;
  try {
    samples = c.decode(payload.bytes, payload.source_dims, payload.dtype,
                       spec.quality);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ExternalCodecError ||
        e.code() == ErrorCode::DecodeError) {
      throw;
    }
    throw Error(ErrorCode::DecodeError, spec.id + ": " + e.what());
  }
  if (samples.size() != payload.source_dims.voxels()) {
    throw Error(ErrorCode::DecodeError, spec.id + ": decoded sample count mismatch");
  }
  return samples;
}

}  // namespace

EncodedPayload encode_slice(const CodecRegistry& registry,
                            const CodecSpec& spec, const Slice& slice) {
  const Codec& c = registry.resolve(spec.id);
  if (!c.supports_slice2d()) {
    throw Error(ErrorCode::UnsupportedMode, spec.id + " has no 2D slice mode");
  }
  if (slice.w < 1 || slice.h < 1 ||
      slice.data.size() != static_cast<std::size_t>(slice.w) * slice.h) {
    throw Error(ErrorCode::InvalidArgument, "malformed slice");
  }
  return encode_block(c, spec, slice.data, {slice.w, slice.h, 1}, slice.dtype);
}

Slice decode_slice(const CodecRegistry& registry, const CodecSpec& spec,
                   const EncodedPayload& payload) {
  const Codec& c = registry.resolve(spec.id);
  if (!c.supports_slice2d()) {
    throw Error(ErrorCode::UnsupportedMode, spec.id + " has no 2D slice mode");
  }
  Slice s;
  s.w = payload.source_dims.w;
  s.h = payload.source_dims.h;
  s.dtype = payload.dtype;
  s.data = decode_block(c, spec, payload);
  return s;
}

EncodedPayload encode_volume(const CodecRegistry& registry,
                             const CodecSpec& spec, const Volume& volume) {
  const Codec& c = registry.resolve(spec.id);
  if (!c.supports_volume3d()) {
    throw Error(ErrorCode::UnsupportedMode, spec.id + " has no 3D volume mode");
  }
  volume.validate();
  return encode_block(c, spec, volume.data, volume.dims, volume.dtype);
}

Volume decode_volume(const CodecRegistry& registry, const CodecSpec& spec,
                     const EncodedPayload& payload) {
  const Codec& c = registry.resolve(spec.id);
  if (!c.supports_volume3d()) {
    throw Error(ErrorCode::UnsupportedMode, spec.id + " has no 3D volume mode");
  }
  Volume v = Volume::zeros(payload.source_dims, payload.dtype);
  v.data = decode_block(c, spec, payload);
  return v;
}

}  // namespace medroi::codec
