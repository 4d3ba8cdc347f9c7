#pragma once

// Data-parallel scans over a volume. Each kernel exists twice: `serial` is
// the reference kept for tests and benchmarks, `omp` splits the work over
// axial slices. Both reduce per-slice partials in ascending z, so their
// results are bit-identical.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "medroi/roi_box.hpp"
#include "medroi/types.hpp"

namespace medroi::kernels {

struct NonzeroSum {
  double sum = 0.0;
  std::uint64_t count = 0;
  friend bool operator==(const NonzeroSum&, const NonzeroSum&) = default;
};

// Local SSIM statistics accumulated over one slice's valid windows.
struct SsimPartial {
  double sum = 0.0;
  std::uint64_t windows = 0;
  friend bool operator==(const SsimPartial&, const SsimPartial&) = default;
};

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

namespace serial {
NonzeroSum nonzero_sum(std::span<const float> data, Dims dims);
std::optional<RoiBox> threshold_bbox(std::span<const float> data, Dims dims,
                                     double tau);
// Nonzero voxels inside `box`; only the box is scanned.
std::uint64_t count_nonzero_inside(std::span<const float> data, Dims dims,
                                   const RoiBox& box);
// Sum over each slice of the region of ((ref - test) * scale)^2, indexed
// by z - region.z_min.
std::vector<double> slice_squared_error(std::span<const float> ref,
                                        std::span<const float> test, Dims dims,
                                        const RoiBox& region, double scale);
std::vector<SsimPartial> slice_ssim(std::span<const float> ref,
                                    std::span<const float> test, Dims dims,
                                    const RoiBox& region, double scale);
}  // namespace serial

namespace omp {
NonzeroSum nonzero_sum(std::span<const float> data, Dims dims);
std::optional<RoiBox> threshold_bbox(std::span<const float> data, Dims dims,
                                     double tau);
// Nonzero voxels inside `box`; only the box is scanned.
std::uint64_t count_nonzero_inside(std::span<const float> data, Dims dims,
                                   const RoiBox& box);
// Sum over each slice of the region of ((ref - test) * scale)^2, indexed
// by z - region.z_min.
std::vector<double> slice_squared_error(std::span<const float> ref,
                                        std::span<const float> test, Dims dims,
                                        const RoiBox& region, double scale);
std::vector<SsimPartial> slice_ssim(std::span<const float> ref,
                                    std::span<const float> test, Dims dims,
                                    const RoiBox& region, double scale);
}  // namespace omp

// Per-slice building blocks shared by both flavours.
namespace detail {
NonzeroSum slice_nonzero_sum(std::span<const float> slice);
std::optional<RoiBox> slice_threshold_bbox(std::span<const float> slice,
                                           Dims dims, int z, double tau);
std::uint64_t slice_count_inside(std::span<const float> slice, Dims dims,
                                 const RoiBox& box);
double slice_sse(std::span<const float> ref, std::span<const float> test,
                 Dims dims, const RoiBox& region, double scale);
SsimPartial slice_ssim_partial(std::span<const float> ref,
                               std::span<const float> test, Dims dims,
                               const RoiBox& region, double scale);
std::optional<RoiBox> merge(const std::optional<RoiBox>& a,
                            const std::optional<RoiBox>& b);
}  // namespace detail

}  // namespace medroi::kernels
