#include "medroi/nifti_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "medroi/byte_io.hpp"
#include "medroi/deflate.hpp"
#include "medroi/error.hpp"

namespace medroi::nifti {

namespace {

// Byte offsets into the 348-byte NIfTI-1 header.
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffQuatern = 256;
constexpr std::size_t kOffQoffset = 268;
constexpr std::size_t kOffSrow = 280;
constexpr std::size_t kOffMagic = 344;

constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;
constexpr std::int16_t kDtUint16 = 512;

class HeaderView {
 public:
  HeaderView(std::span<const std::uint8_t> bytes, bool swap)
      : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t off) const {
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), bytes_.data() + off, sizeof(T));
    if (swap_) std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
  }
  std::int16_t i16(std::size_t off) const { return get<std::int16_t>(off); }
  float f32(std::size_t off) const { return get<float>(off); }

 private:
  std::span<const std::uint8_t> bytes_;
  bool swap_;
};

Dtype dtype_from_code(std::int16_t code) {
  switch (code) {
    case kDtUint8: return Dtype::U8;
    case kDtInt16: return Dtype::I16;
    case kDtUint16: return Dtype::U16;
    case kDtFloat32: return Dtype::F32;
    default:
      throw Error(ErrorCode::UnsupportedFormat,
                  "unsupported NIfTI datatype " + std::to_string(code));
  }
}

std::int16_t code_from_dtype(Dtype dtype) {
  switch (dtype) {
    case Dtype::U8: return kDtUint8;
    case Dtype::I16: return kDtInt16;
    case Dtype::U16: return kDtUint16;
    case Dtype::F32: return kDtFloat32;
  }
  return 0;
}

Mat4 qform_affine(const HeaderView& h) {
  double b = h.f32(kOffQuatern);
  double c = h.f32(kOffQuatern + 4);
  double d = h.f32(kOffQuatern + 8);
  double a = 1.0 - (b * b + c * c + d * d);
  if (a < 1e-7) {
    const double n = 1.0 / std::sqrt(b * b + c * c + d * d);
    b *= n;
    c *= n;
    d *= n;
    a = 0.0;
  } else {
    a = std::sqrt(a);
  }
  const double qfac = h.f32(kOffPixdim) < 0.0f ? -1.0 : 1.0;
  auto spacing = [&](int i) {
    const double p = h.f32(kOffPixdim + 4 * static_cast<std::size_t>(i));
    return p > 0.0 ? p : 1.0;
  };
  const double dx = spacing(1);
  const double dy = spacing(2);
  const double dz = spacing(3) * qfac;

  Mat4 m = identity_affine();
  m[0][0] = (a * a + b * b - c * c - d * d) * dx;
  m[0][1] = 2.0 * (b * c - a * d) * dy;
  m[0][2] = 2.0 * (b * d + a * c) * dz;
  m[1][0] = 2.0 * (b * c + a * d) * dx;
  m[1][1] = (a * a + c * c - b * b - d * d) * dy;
  m[1][2] = 2.0 * (c * d - a * b) * dz;
  m[2][0] = 2.0 * (b * d - a * c) * dx;
  m[2][1] = 2.0 * (c * d + a * b) * dy;
  m[2][2] = (a * a + d * d - c * c - b * b) * dz;
  for (int i = 0; i < 3; ++i) {
    m[i][3] = h.f32(kOffQoffset + 4 * static_cast<std::size_t>(i));
  }
  return m;
}

Mat4 header_affine(const HeaderView& h) {
  if (h.i16(kOffSformCode) > 0) {
    Mat4 m = identity_affine();
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        m[r][c] = h.f32(kOffSrow + 16 * r + 4 * c);
    return m;
  }
  if (h.i16(kOffQformCode) > 0) return qform_affine(h);
  Mat4 m = identity_affine();
  for (int i = 0; i < 3; ++i) {
    const double p = h.f32(kOffPixdim + 4 * static_cast<std::size_t>(i + 1));
    m[i][i] = p > 0.0 ? p : 1.0;
  }
  return m;
}

}  // namespace

Volume parse_nifti(std::span<const std::uint8_t> file_bytes) {
  std::vector<std::uint8_t> inflated;
  std::span<const std::uint8_t> bytes = file_bytes;
  if (deflate::is_gzip(file_bytes)) {
    inflated = deflate::gunzip(file_bytes);
    bytes = inflated;
  }
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::UnsupportedFormat, "file shorter than NIfTI header");
  }

  std::int32_t sizeof_hdr = 0;
  std::memcpy(&sizeof_hdr, bytes.data(), 4);
  bool swap = false;
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    if (static_cast<std::int32_t>(__builtin_bswap32(static_cast<std::uint32_t>(sizeof_hdr))) !=
        static_cast<std::int32_t>(kHeaderSize)) {
      throw Error(ErrorCode::UnsupportedFormat, "sizeof_hdr is not 348");
    }
    swap = true;
  }
  if (std::memcmp(bytes.data() + kOffMagic, "n+1\0", 4) != 0) {
    throw Error(ErrorCode::UnsupportedFormat, "missing n+1 magic");
  }

  const HeaderView h(bytes, swap);
  const std::int16_t ndim = h.i16(kOffDim);
  const std::int16_t dim4 = h.i16(kOffDim + 8);
  if (!(ndim == 3 || (ndim == 4 && dim4 == 1))) {
    throw Error(ErrorCode::UnsupportedFormat,
                "only 3D volumes (or 4D with a singleton 4th axis) are supported");
  }

  Volume v;
  v.dims = {h.i16(kOffDim + 2), h.i16(kOffDim + 4), h.i16(kOffDim + 6)};
  for (int n : {v.dims.w, v.dims.h, v.dims.d}) {
    if (n < 1) throw Error(ErrorCode::UnsupportedFormat, "non-positive dimension");
  }
  v.dtype = dtype_from_code(h.i16(kOffDatatype));
  if (h.i16(kOffBitpix) != bits_per_sample(v.dtype)) {
    throw Error(ErrorCode::UnsupportedFormat, "bitpix disagrees with datatype");
  }
  v.affine = header_affine(h);
  const float slope = h.f32(kOffSclSlope);
  v.scl_slope = slope;
  v.scl_inter = h.f32(kOffSclInter);

  const float vox_offset_f = h.f32(kOffVoxOffset);
  const auto vox_offset = static_cast<std::size_t>(
      std::max(vox_offset_f, static_cast<float>(kHeaderSize)));
  const std::size_t bps = static_cast<std::size_t>(bytes_per_sample(v.dtype));
  const std::size_t need = v.dims.voxels() * bps;
  if (bytes.size() < vox_offset || bytes.size() - vox_offset < need) {
    throw Error(ErrorCode::UnsupportedFormat, "truncated data section");
  }

  auto data = bytes.subspan(vox_offset, need);
  if (swap && bps > 1) {
    std::vector<std::uint8_t> le(data.begin(), data.end());
    for (std::size_t i = 0; i < le.size(); i += bps) {
      std::reverse(le.begin() + static_cast<std::ptrdiff_t>(i),
                   le.begin() + static_cast<std::ptrdiff_t>(i + bps));
    }
    v.data = unpack_samples(le, v.dtype);
  } else {
    v.data = unpack_samples(data, v.dtype);
  }
  v.source_byte_len = bytes.size();
  return v;
}

Volume read_nifti(const std::string& path) {
  return parse_nifti(read_file(path));
}

std::vector<std::uint8_t> serialize_nifti(const Volume& volume) {
  volume.validate();
  std::vector<std::uint8_t> out(kVoxOffset, 0);
  auto put = [&out](std::size_t off, auto value) {
    std::memcpy(out.data() + off, &value, sizeof(value));
  };
  static_assert(std::endian::native == std::endian::little,
                "writer assumes a little-endian host");

  put(0, static_cast<std::int32_t>(kHeaderSize));
  put(kOffDim, std::int16_t{3});
  put(kOffDim + 2, static_cast<std::int16_t>(volume.dims.w));
  put(kOffDim + 4, static_cast<std::int16_t>(volume.dims.h));
  put(kOffDim + 6, static_cast<std::int16_t>(volume.dims.d));
  for (std::size_t i = 4; i < 8; ++i) put(kOffDim + 2 * i, std::int16_t{1});
  put(kOffDatatype, code_from_dtype(volume.dtype));
  put(kOffBitpix, static_cast<std::int16_t>(bits_per_sample(volume.dtype)));

  put(kOffPixdim, 1.0f);
  for (std::size_t c = 0; c < 3; ++c) {
    double norm = 0.0;
    for (std::size_t r = 0; r < 3; ++r) norm += volume.affine[r][c] * volume.affine[r][c];
    put(kOffPixdim + 4 * (c + 1), static_cast<float>(std::sqrt(norm)));
  }
  put(kOffVoxOffset, static_cast<float>(kVoxOffset));
  put(kOffSclSlope, static_cast<float>(volume.scl_slope));
  put(kOffSclInter, static_cast<float>(volume.scl_inter));
  put(kOffQformCode, std::int16_t{0});
  put(kOffSformCode, std::int16_t{1});
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      put(kOffSrow + 16 * r + 4 * c, static_cast<float>(volume.affine[r][c]));
  std::memcpy(out.data() + kOffMagic, "n+1\0", 4);

  const auto samples = pack_samples(volume.data, volume.dtype);
  out.insert(out.end(), samples.begin(), samples.end());
  return out;
}

void write_nifti(const Volume& volume, const std::string& path) {
  write_file(path, serialize_nifti(volume));
}

}  // namespace medroi::nifti
