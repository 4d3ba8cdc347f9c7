#pragma once

#include "medroi/codec.hpp"
#include "medroi/container.hpp"
#include "medroi/roi.hpp"
#include "medroi/types.hpp"

namespace medroi::pipeline {

using container::Archive;
using container::DimMode;
using container::Mode;

struct CompressOptions {
  DimMode dim_mode = DimMode::Slice2D;
  // Append the original translation (12 bytes) after the metadata record.
  bool exact_affine = false;
  // Full mode only: store a whole-volume metadata record so the output
  // keeps its rotation-scaling. Off by default, so a full archive holds
  // nothing beyond the codec payloads and the container header.
  bool full_mode_affine = false;
};

// Whole volume; Slice2D yields one payload per axial slice in ascending z.
Archive compress_full(const Volume& volume, const codec::CodecSpec& spec,
                      const CompressOptions& options = {},
                      const codec::CodecRegistry& registry =
                          codec::default_registry());

// Extract the ROI, crop, encode the cropped region and embed the 54-byte
// record. `report`, when given, receives the extraction result. Throws
// AllZeroVolume when there is nothing to crop to.
Archive compress_roi(const Volume& volume, const codec::CodecSpec& spec,
                     const CompressOptions& options = {},
                     const codec::CodecRegistry& registry =
                         codec::default_registry(),
                     roi::RoiReport* report = nullptr);

// Reconstruct at the original dimensions. ROI archives are placed into a
// zero-filled volume at the recorded box.
Volume decompress(const Archive& archive,
                  const codec::CodecRegistry& registry =
                      codec::default_registry());

}  // namespace medroi::pipeline
