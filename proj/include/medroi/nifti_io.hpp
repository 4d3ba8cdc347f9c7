#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "medroi/types.hpp"

namespace medroi::nifti {

inline constexpr std::size_t kHeaderSize = 348;
inline constexpr std::size_t kVoxOffset = 352;

// NIfTI-1 single-file volumes (u8, i16, u16, f32), plain or gzip-wrapped.
// Affine preference: sform, then qform, then diagonal pixdim. Scaling
// fields are carried along but never applied to the samples.
Volume read_nifti(const std::string& path);
Volume parse_nifti(std::span<const std::uint8_t> file_bytes);

// Always little-endian, sform_code = 1, vox_offset = 352.
void write_nifti(const Volume& volume, const std::string& path);
std::vector<std::uint8_t> serialize_nifti(const Volume& volume);

}  // namespace medroi::nifti
