#include "medroi/kernels.hpp"

namespace medroi::kernels::omp {

namespace {

std::span<const float> plane(std::span<const float> data, Dims dims, int z) {
  return data.subspan(static_cast<std::size_t>(z) * dims.slice_voxels(),
                      dims.slice_voxels());
}

}  // namespace

NonzeroSum nonzero_sum(std::span<const float> data, Dims dims) {
  std::vector<NonzeroSum> parts(static_cast<std::size_t>(dims.d));
#pragma omp parallel for schedule(static)
  for (int z = 0; z < dims.d; ++z) {
    parts[z] = detail::slice_nonzero_sum(plane(data, dims, z));
  }
  NonzeroSum total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.count += p.count;
  }
  return total;
}

std::optional<RoiBox> threshold_bbox(std::span<const float> data, Dims dims,
                                     double tau) {
  std::vector<std::optional<RoiBox>> parts(static_cast<std::size_t>(dims.d));
#pragma omp parallel for schedule(static)
  for (int z = 0; z < dims.d; ++z) {
    parts[z] = detail::slice_threshold_bbox(plane(data, dims, z), dims, z, tau);
  }
  std::optional<RoiBox> box;
  for (const auto& p : parts) box = detail::merge(box, p);
  return box;
}

std::uint64_t count_nonzero_inside(std::span<const float> data, Dims dims,
                                   const RoiBox& box) {
  std::uint64_t n = 0;
#pragma omp parallel for schedule(static) reduction(+ : n)
  for (int z = box.z_min; z <= box.z_max; ++z) {
    n += detail::slice_count_inside(plane(data, dims, z), dims, box);
  }
  return n;
}

std::vector<double> slice_squared_error(std::span<const float> ref,
                                        std::span<const float> test, Dims dims,
                                        const RoiBox& region, double scale) {
  const int depth = region.z_max - region.z_min + 1;
  std::vector<double> out(static_cast<std::size_t>(depth));
#pragma omp parallel for schedule(static)
  for (int k = 0; k < depth; ++k) {
    const int z = region.z_min + k;
    out[k] = detail::slice_sse(plane(ref, dims, z), plane(test, dims, z), dims,
                               region, scale);
  }
  return out;
}

std::vector<SsimPartial> slice_ssim(std::span<const float> ref,
                                    std::span<const float> test, Dims dims,
                                    const RoiBox& region, double scale) {
  const int depth = region.z_max - region.z_min + 1;
  std::vector<SsimPartial> out(static_cast<std::size_t>(depth));
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < depth; ++k) {
    const int z = region.z_min + k;
    out[k] = detail::slice_ssim_partial(plane(ref, dims, z),
                                        plane(test, dims, z), dims, region,
                                        scale);
  }
  return out;
}

}  // namespace medroi::kernels::omp
