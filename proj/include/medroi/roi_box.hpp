#pragma once

#include <cstdint>

#include "medroi/types.hpp"

namespace medroi {

// Inclusive axis-aligned box in voxel coordinates.
struct RoiBox {
  int x_min = 0, x_max = 0;
  int y_min = 0, y_max = 0;
  int z_min = 0, z_max = 0;

  static RoiBox full(Dims dims) {
    return {0, dims.w - 1, 0, dims.h - 1, 0, dims.d - 1};
  }

  Dims extent() const {
    return {x_max - x_min + 1, y_max - y_min + 1, z_max - z_min + 1};
  }
  std::uint64_t voxels() const { return extent().voxels(); }

  bool contains(int x, int y, int z) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max &&
           z >= z_min && z <= z_max;
  }
  bool ordered() const {
    return x_min <= x_max && y_min <= y_max && z_min <= z_max;
  }
  bool within(Dims dims) const {
    return ordered() && x_min >= 0 && y_min >= 0 && z_min >= 0 &&
           x_max < dims.w && y_max < dims.h && z_max < dims.d;
  }

  friend bool operator==(const RoiBox&, const RoiBox&) = default;
};

}  // namespace medroi
