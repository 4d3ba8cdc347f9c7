#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "medroi/roi_box.hpp"
#include "medroi/types.hpp"

namespace medroi::metadata {

inline constexpr std::size_t kRecordSize = 54;
// Optional f32 translation appended when the exact affine is requested.
inline constexpr std::size_t kTranslationSize = 12;

using Record = std::array<std::uint8_t, kRecordSize>;

// Restoration record for an ROI archive:
//   bytes  0..11  box (x_min, x_max, y_min, y_max, z_min, z_max), int16 LE
//   bytes 12..17  original shape (W, H, D), int16 LE
//   bytes 18..53  3x3 rotation-scaling, float32 LE, row-major
struct RoiMetadata {
  RoiBox box;
  Dims original_shape;
  std::array<std::array<float, 3>, 3> rot_scale{};

  friend bool operator==(const RoiMetadata&, const RoiMetadata&) = default;
};

RoiMetadata make_metadata(const RoiBox& box, const Volume& volume);

// Throws FieldOverflow when a bound or dimension leaves int16.
Record encode_metadata(const RoiMetadata& m);

// Throws WrongLength or InvalidBox.
RoiMetadata decode_metadata(std::span<const std::uint8_t> bytes);

// Full-volume affine using the centre-origin convention:
// t = -R * ((W-1)/2, (H-1)/2, (D-1)/2).
Mat4 restore_affine(const RoiMetadata& m);

// Same rotation-scaling with an explicitly stored translation.
Mat4 restore_affine(const RoiMetadata& m, const std::array<float, 3>& t);

}  // namespace medroi::metadata
