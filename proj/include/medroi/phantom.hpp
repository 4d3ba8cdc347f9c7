#pragma once

#include <cstdint>

#include "medroi/types.hpp"

namespace medroi {

struct PhantomSpec {
  std::uint64_t seed = 1;
  Dims dims{64, 64, 64};
  // Fraction of each axis covered by the ellipsoid's bounding box.
  double tissue_fraction = 0.5;
  // Background is uniform in [0, noise_amplitude]; exactly 0 when 0.
  double noise_amplitude = 0.0;
  double intensity_peak = 1000.0;
  Dtype dtype = Dtype::I16;

  void validate() const;
};

// Inclusive index range the ellipsoid occupies on one axis.
struct AxisExtent {
  int lo = 0;
  int hi = 0;
};
AxisExtent phantom_axis_extent(int dim, double tissue_fraction);

// Seeded brain-like volume: a centred ellipsoid whose intensity falls off
// radially with a small ripple, over an optional noisy background.
Volume generate_phantom(const PhantomSpec& spec);

}  // namespace medroi
