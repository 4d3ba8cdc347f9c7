#include "medroi/types.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "medroi/error.hpp"

namespace medroi {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::AllZeroVolume: return "AllZeroVolume";
    case ErrorCode::EmptyTissueSet: return "EmptyTissueSet";
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::FieldOverflow: return "FieldOverflow";
    case ErrorCode::UnknownCodec: return "UnknownCodec";
    case ErrorCode::UnsupportedMode: return "UnsupportedMode";
    case ErrorCode::EncodeError: return "EncodeError";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::ExternalCodecError: return "ExternalCodecError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SmallRegion: return "SmallRegion";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code),
      index_(index) {}

int bytes_per_sample(Dtype dtype) {
  switch (dtype) {
    case Dtype::U8: return 1;
    case Dtype::I16:
    case Dtype::U16: return 2;
    case Dtype::F32: return 4;
  }
  return 0;
}

int bits_per_sample(Dtype dtype) { return 8 * bytes_per_sample(dtype); }

std::string_view dtype_name(Dtype dtype) {
  switch (dtype) {
    case Dtype::U8: return "u8";
    case Dtype::I16: return "i16";
    case Dtype::U16: return "u16";
    case Dtype::F32: return "f32";
  }
  return "?";
}

bool is_integer(Dtype dtype) { return dtype != Dtype::F32; }

float to_representable(double value, Dtype dtype) {
  double lo = 0.0;
  double hi = 0.0;
  switch (dtype) {
    case Dtype::U8: lo = 0; hi = 255; break;
    case Dtype::I16: lo = -32768; hi = 32767; break;
    case Dtype::U16: lo = 0; hi = 65535; break;
    case Dtype::F32: return static_cast<float>(value);
  }
  if (std::isnan(value)) return 0.0f;
  return static_cast<float>(std::clamp(std::nearbyint(value), lo, hi));
}

Mat4 identity_affine() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Mat3 rotation_scaling(const Mat4& affine) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = affine[i][j];
  return r;
}

std::array<double, 3> translation(const Mat4& affine) {
  return {affine[0][3], affine[1][3], affine[2][3]};
}

Mat4 compose_affine(const Mat3& rot_scale, const std::array<double, 3>& t) {
  Mat4 m = identity_affine();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = rot_scale[i][j];
    m[i][3] = t[i];
  }
  return m;
}

std::uint64_t nifti_plain_size(Dims dims, Dtype dtype) {
  return 352u + static_cast<std::uint64_t>(dims.voxels()) *
                    static_cast<std::uint64_t>(bytes_per_sample(dtype));
}

Volume Volume::zeros(Dims dims, Dtype dtype) {
  Volume v;
  v.dims = dims;
  v.dtype = dtype;
  v.data.assign(dims.voxels(), 0.0f);
  v.source_byte_len = nifti_plain_size(dims, dtype);
  return v;
}

void Volume::validate() const {
  for (int n : {dims.w, dims.h, dims.d}) {
    if (n < 1 || n > kMaxDim) {
      throw Error(ErrorCode::InvalidArgument,
                  "dimension " + std::to_string(n) + " outside [1, 32767]");
    }
  }
  if (data.size() != dims.voxels()) {
    throw Error(ErrorCode::InvalidArgument, "data length does not match dims");
  }
  if (affine[3][0] != 0.0 || affine[3][1] != 0.0 || affine[3][2] != 0.0 ||
      affine[3][3] != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "affine bottom row is not (0,0,0,1)");
  }
}

std::vector<std::uint8_t> pack_samples(std::span<const float> samples,
                                       Dtype dtype) {
  const auto bps = static_cast<std::size_t>(bytes_per_sample(dtype));
  std::vector<std::uint8_t> out(samples.size() * bps);
  std::uint8_t* p = out.data();
  for (float s : samples) {
    std::uint32_t bits = 0;
    switch (dtype) {
      case Dtype::U8: bits = static_cast<std::uint8_t>(s); break;
      case Dtype::I16:
        bits = static_cast<std::uint16_t>(static_cast<std::int16_t>(s));
        break;
      case Dtype::U16: bits = static_cast<std::uint16_t>(s); break;
      case Dtype::F32: bits = std::bit_cast<std::uint32_t>(s); break;
    }
    for (std::size_t b = 0; b < bps; ++b) {
      *p++ = static_cast<std::uint8_t>(bits >> (8 * b));
    }
  }
  return out;
}

std::vector<float> unpack_samples(std::span<const std::uint8_t> bytes,
                                  Dtype dtype) {
  const auto bps = static_cast<std::size_t>(bytes_per_sample(dtype));
  std::vector<float> out(bytes.size() / bps);
  const std::uint8_t* p = bytes.data();
  for (float& s : out) {
    std::uint32_t bits = 0;
    for (std::size_t b = 0; b < bps; ++b) {
      bits |= static_cast<std::uint32_t>(p[b]) << (8 * b);
    }
    p += bps;
    switch (dtype) {
      case Dtype::U8: s = static_cast<float>(bits); break;
      case Dtype::I16:
        s = static_cast<float>(static_cast<std::int16_t>(bits));
        break;
      case Dtype::U16: s = static_cast<float>(bits); break;
      case Dtype::F32: s = std::bit_cast<float>(bits); break;
    }
  }
  return out;
}

}  // namespace medroi
