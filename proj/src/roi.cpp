#include "medroi/roi.hpp"

#include <algorithm>
#include <cstring>

#include "medroi/error.hpp"
#include "medroi/kernels.hpp"

namespace medroi::roi {

namespace {

double threshold_of(const kernels::NonzeroSum& nz) {
  if (nz.count == 0) {
    throw Error(ErrorCode::AllZeroVolume,
                "volume has no nonzero voxels; use full mode");
  }
  return nz.sum / static_cast<double>(nz.count);
}

// Voxels outside the box are the total minus those inside, so only the
// box is scanned.
double miss_fraction(const Volume& volume, const RoiBox& box,
                     std::uint64_t nonzero) {
  if (nonzero == 0) return 0.0;
  const auto inside =
      kernels::omp::count_nonzero_inside(volume.data, volume.dims, box);
  return static_cast<double>(nonzero - inside) / static_cast<double>(nonzero);
}

}  // namespace

double compute_threshold(const Volume& volume) {
  return threshold_of(kernels::omp::nonzero_sum(volume.data, volume.dims));
}

RoiBox compute_bbox(const Volume& volume, double tau) {
  const auto box = kernels::omp::threshold_bbox(volume.data, volume.dims, tau);
  if (!box) {
    throw Error(ErrorCode::EmptyTissueSet, "no voxel reaches the threshold");
  }
  return *box;
}

double miss_rate(const Volume& volume, const RoiBox& box) {
  if (!box.within(volume.dims)) {
    throw Error(ErrorCode::InvalidBox, "box outside the volume");
  }
  const auto nz = kernels::omp::nonzero_sum(volume.data, volume.dims);
  return miss_fraction(volume, box, nz.count);
}

RoiBox pad_box(const RoiBox& box, Dims dims, int pad) {
  return {std::max(box.x_min - pad, 0), std::min(box.x_max + pad, dims.w - 1),
          std::max(box.y_min - pad, 0), std::min(box.y_max + pad, dims.h - 1),
          std::max(box.z_min - pad, 0), std::min(box.z_max + pad, dims.d - 1)};
}

RoiReport extract_roi(const Volume& volume) {
  const auto nz = kernels::omp::nonzero_sum(volume.data, volume.dims);
  RoiReport report;
  report.tau = threshold_of(nz);
  report.tight_box = compute_bbox(volume, report.tau);
  report.box = report.tight_box;
  report.pre_pad_miss_rate = miss_fraction(volume, report.tight_box, nz.count);
  report.post_pad_miss_rate = report.pre_pad_miss_rate;
  if (report.pre_pad_miss_rate > kMissRateLimit) {
    report.box = pad_box(report.tight_box, volume.dims);
    report.post_pad_miss_rate = miss_fraction(volume, report.box, nz.count);
    report.padded = true;
  }
  return report;
}

Volume crop(const Volume& volume, const RoiBox& box) {
  if (!box.within(volume.dims)) {
    throw Error(ErrorCode::InvalidBox, "crop box outside the volume");
  }
  Volume out;
  out.dims = box.extent();
  out.dtype = volume.dtype;
  out.scl_slope = volume.scl_slope;
  out.scl_inter = volume.scl_inter;
  out.source_byte_len = nifti_plain_size(out.dims, out.dtype);
  out.data.resize(out.dims.voxels());

  const auto row_len = static_cast<std::size_t>(out.dims.w);
  for (int z = 0; z < out.dims.d; ++z) {
    for (int y = 0; y < out.dims.h; ++y) {
      const float* src = &volume.data[volume.index(box.x_min, box.y_min + y,
                                                   box.z_min + z)];
      std::memcpy(&out.data[out.index(0, y, z)], src, row_len * sizeof(float));
    }
  }

  const Mat3 r = rotation_scaling(volume.affine);
  auto t = translation(volume.affine);
  const std::array<double, 3> origin = {static_cast<double>(box.x_min),
                                        static_cast<double>(box.y_min),
                                        static_cast<double>(box.z_min)};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) t[i] += r[i][j] * origin[j];
  }
  out.affine = compose_affine(r, t);
  return out;
}

}  // namespace medroi::roi
