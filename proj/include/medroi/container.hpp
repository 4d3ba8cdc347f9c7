#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medroi/metadata.hpp"
#include "medroi/types.hpp"

namespace medroi::container {

inline constexpr std::string_view kMagic = "MROI";
inline constexpr std::uint8_t kVersion = 1;

enum class Mode : std::uint8_t { Full = 0, Roi = 1 };
enum class DimMode : std::uint8_t { Slice2D = 0, Volume3D = 1 };

// Flag byte bits.
inline constexpr std::uint8_t kHasMetadata = 0x01;
inline constexpr std::uint8_t kHasTranslation = 0x02;

struct Archive {
  Mode mode = Mode::Full;
  DimMode dim_mode = DimMode::Slice2D;
  Dtype dtype = Dtype::I16;
  std::string codec_id;
  std::int16_t quality = 0;
  Dims original_shape;
  // Required in Roi mode; optional in Full mode, where its box spans the
  // whole volume.
  std::optional<metadata::RoiMetadata> metadata;
  // Exact world translation of the original affine (needs metadata).
  std::optional<std::array<float, 3>> translation;
  std::vector<std::vector<std::uint8_t>> payloads;

  // Voxel region the payloads cover.
  RoiBox encoded_region() const;
  std::size_t expected_payloads() const;

  friend bool operator==(const Archive&, const Archive&) = default;
};

// Bytes before the payload list excluding the codec id, the metadata record
// and the translation: magic 4, version 1, mode 1, dim_mode 1, dtype 1,
// id length 1, quality 2, shape 6, flags 1, payload count 4.
inline constexpr std::size_t kFixedHeaderSize = 22;
inline constexpr std::size_t kPayloadPrefixSize = 4;

// Size the serialized archive will have, from the layout alone.
std::size_t serialized_size(const Archive& archive);

// Throws InvalidArgument when an invariant fails (e.g. zero payloads).
std::vector<std::uint8_t> serialize(const Archive& archive);

// Throws BadMagic, UnsupportedVersion, Truncated (with the payload index
// when the cut falls inside the payload list), ShapeMismatch, and metadata
// decode errors.
Archive deserialize(std::span<const std::uint8_t> bytes);

std::string_view mode_name(Mode mode);
std::string_view dim_mode_name(DimMode dim);

}  // namespace medroi::container
