#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace medroi {

// Sample types a volume may originate from. Every one of them is held
// exactly in a float (16-bit integers need 17 mantissa bits at most).
enum class Dtype : std::uint8_t { U8 = 0, I16 = 1, U16 = 2, F32 = 3 };

int bytes_per_sample(Dtype dtype);
int bits_per_sample(Dtype dtype);
std::string_view dtype_name(Dtype dtype);
bool is_integer(Dtype dtype);

// Round and clamp a reconstructed value into the representable range of
// `dtype`. Floats pass through after narrowing.
float to_representable(double value, Dtype dtype);

struct Dims {
  int w = 0;
  int h = 0;
  int d = 0;

  std::size_t voxels() const {
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
           static_cast<std::size_t>(d);
  }
  std::size_t slice_voxels() const {
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

inline constexpr int kMaxDim = 32767;

using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 identity_affine();
Mat3 rotation_scaling(const Mat4& affine);
std::array<double, 3> translation(const Mat4& affine);
Mat4 compose_affine(const Mat3& rot_scale, const std::array<double, 3>& t);

// A 3D scalar grid in canonical order: x fastest, then y, then z.
struct Volume {
  Dims dims;
  Dtype dtype = Dtype::F32;
  std::vector<float> data;
  Mat4 affine = identity_affine();
  double scl_slope = 1.0;
  double scl_inter = 0.0;
  // Uncompressed on-disk NIfTI size (header + padding + data).
  std::uint64_t source_byte_len = 0;

  // Zero-filled volume with identity affine and the byte length a plain
  // single-file NIfTI of these dims would have.
  static Volume zeros(Dims dims, Dtype dtype);

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * static_cast<std::size_t>(dims.h) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(dims.w) +
           static_cast<std::size_t>(x);
  }
  float at(int x, int y, int z) const { return data[index(x, y, z)]; }
  float& at(int x, int y, int z) { return data[index(x, y, z)]; }

  std::span<const float> slice(int z) const {
    return std::span<const float>(data).subspan(
        static_cast<std::size_t>(z) * dims.slice_voxels(), dims.slice_voxels());
  }

  // Throws InvalidArgument when the dims, data length or affine are off.
  void validate() const;
};

// One axial plane.
struct Slice {
  int w = 0;
  int h = 0;
  Dtype dtype = Dtype::F32;
  std::vector<float> data;
};

std::uint64_t nifti_plain_size(Dims dims, Dtype dtype);

// Little-endian sample packing in the source dtype.
std::vector<std::uint8_t> pack_samples(std::span<const float> samples,
                                       Dtype dtype);
std::vector<float> unpack_samples(std::span<const std::uint8_t> bytes,
                                  Dtype dtype);

}  // namespace medroi
