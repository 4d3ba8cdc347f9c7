#include "medroi/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "medroi/error.hpp"

namespace medroi {

namespace {

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double dtype_max(Dtype dtype) {
  switch (dtype) {
    case Dtype::U8: return 255.0;
    case Dtype::I16: return 32767.0;
    case Dtype::U16: return 65535.0;
    case Dtype::F32: return 3.0e38;
  }
  return 0.0;
}

}  // namespace

void PhantomSpec::validate() const {
  if (dims.w < 8 || dims.h < 8 || dims.d < 8) {
    throw Error(ErrorCode::InvalidArgument, "phantom dims must be at least 8");
  }
  if (dims.w > kMaxDim || dims.h > kMaxDim || dims.d > kMaxDim) {
    throw Error(ErrorCode::InvalidArgument, "phantom dims exceed 32767");
  }
  if (!(tissue_fraction > 0.0 && tissue_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tissue_fraction must be in (0, 1]");
  }
  if (!(noise_amplitude >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise_amplitude must be >= 0");
  }
  if (!(intensity_peak > 0.0) || intensity_peak > dtype_max(dtype) ||
      std::max(intensity_peak, noise_amplitude) > dtype_max(dtype)) {
    throw Error(ErrorCode::InvalidArgument,
                "intensity_peak must be positive and fit the dtype");
  }
}

AxisExtent phantom_axis_extent(int dim, double tissue_fraction) {
  const int extent = std::clamp(
      static_cast<int>(std::lround(tissue_fraction * dim)), 1, dim);
  const int lo = (dim - extent) / 2;
  return {lo, lo + extent - 1};
}

Volume generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  const std::array<AxisExtent, 3> ext = {
      phantom_axis_extent(spec.dims.w, spec.tissue_fraction),
      phantom_axis_extent(spec.dims.h, spec.tissue_fraction),
      phantom_axis_extent(spec.dims.d, spec.tissue_fraction)};
  std::array<double, 3> centre{};
  std::array<double, 3> radius{};
  for (std::size_t a = 0; a < 3; ++a) {
    centre[a] = 0.5 * (ext[a].lo + ext[a].hi);
    radius[a] = 0.5 * (ext[a].hi - ext[a].lo + 1);
  }
  const double min_radius = std::min({radius[0], radius[1], radius[2]});

  // Ripple: a few cycles per ellipsoid extent, seeded phase and frequency.
  std::array<double, 3> freq{};
  std::array<double, 3> phase{};
  for (std::size_t a = 0; a < 3; ++a) {
    freq[a] = (1.5 + 1.5 * unit_uniform(rng)) * std::numbers::pi / radius[a];
    phase[a] = 2.0 * std::numbers::pi * unit_uniform(rng);
  }
  constexpr double kRippleAmplitude = 0.06;
  constexpr double kRimDepth = 0.6;
  constexpr double kRimWidth = 1.5;

  Volume v = Volume::zeros(spec.dims, spec.dtype);
  for (int z = 0; z < spec.dims.d; ++z) {
    for (int y = 0; y < spec.dims.h; ++y) {
      for (int x = 0; x < spec.dims.w; ++x) {
        const double ux = (x - centre[0]) / radius[0];
        const double uy = (y - centre[1]) / radius[1];
        const double uz = (z - centre[2]) / radius[2];
        const double rho = std::sqrt(ux * ux + uy * uy + uz * uz);
        float value = 0.0f;
        if (rho <= 1.0) {
          // Distance to the surface in voxels, measured on the shortest axis.
          const double depth = (1.0 - rho) * min_radius;
          const double base = 1.0 - kRimDepth * std::exp(-depth / kRimWidth);
          const double ripple = kRippleAmplitude *
                                std::sin(freq[0] * x + phase[0]) *
                                std::sin(freq[1] * y + phase[1]) *
                                std::sin(freq[2] * z + phase[2]);
          const double rel = std::clamp(base + ripple, 0.31, 1.0);
          value = to_representable(rel * spec.intensity_peak, spec.dtype);
          if (value <= 0.0f) value = is_integer(spec.dtype) ? 1.0f : 1e-6f;
        } else if (spec.noise_amplitude > 0.0) {
          value = to_representable(unit_uniform(rng) * spec.noise_amplitude,
                                   spec.dtype);
        }
        v.at(x, y, z) = value;
      }
    }
  }
  return v;
}

}  // namespace medroi
