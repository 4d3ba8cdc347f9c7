#pragma once

#include "medroi/roi_box.hpp"
#include "medroi/types.hpp"

namespace medroi::roi {

// Padding rule: when the tight box misses more than this fraction of the
// nonzero voxels, every face moves out by kPadVoxels (clamped), once.
inline constexpr double kMissRateLimit = 0.002;
inline constexpr int kPadVoxels = 3;

struct RoiReport {
  double tau = 0.0;
  RoiBox box;
  // Tight box of the tissue set before padding.
  RoiBox tight_box;
  double pre_pad_miss_rate = 0.0;
  double post_pad_miss_rate = 0.0;
  bool padded = false;
};

// Mean of the strictly nonzero voxels. Throws AllZeroVolume.
double compute_threshold(const Volume& volume);

// Tight inclusive box of {x : I(x) >= tau}. Throws EmptyTissueSet.
RoiBox compute_bbox(const Volume& volume, double tau);

// Fraction of nonzero voxels lying outside `box`; 0 for an all-zero volume.
double miss_rate(const Volume& volume, const RoiBox& box);

RoiBox pad_box(const RoiBox& box, Dims dims, int pad = kPadVoxels);

RoiReport extract_roi(const Volume& volume);

// Cropped copy whose affine keeps the world position of every retained voxel.
Volume crop(const Volume& volume, const RoiBox& box);

}  // namespace medroi::roi
