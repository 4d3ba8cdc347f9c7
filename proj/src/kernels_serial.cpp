#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "medroi/kernels.hpp"

namespace medroi::kernels {

namespace detail {

NonzeroSum slice_nonzero_sum(std::span<const float> slice) {
  // Zeros add nothing to the sum, so the count runs as its own pass.
  // Eight accumulators break the floating-point dependency chain.
  constexpr std::size_t kLanes = 8;
  std::array<double, kLanes> acc{};
  const std::size_t n = slice.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t k = 0; k < kLanes; ++k) acc[k] += static_cast<double>(slice[i + k]);
  }
  for (; i < n; ++i) acc[0] += static_cast<double>(slice[i]);
  std::uint32_t count = 0;
  for (float v : slice) count += v != 0.0f;
  double sum = 0.0;
  for (double a : acc) sum += a;
  return {sum, count};
}

float float_threshold(double tau) {
  float t = static_cast<float>(tau);
  if (static_cast<double>(t) < tau) {
    t = std::nextafter(t, std::numeric_limits<float>::infinity());
  }
  return t;
}

std::optional<RoiBox> slice_threshold_bbox(std::span<const float> slice,
                                           Dims dims, int z, double tau) {
  const float t = float_threshold(tau);
  std::optional<RoiBox> box;
  for (int y = 0; y < dims.h; ++y) {
    const float* row = slice.data() + static_cast<std::size_t>(y) * dims.w;
    int hit = 0;
    for (int x = 0; x < dims.w; ++x) hit |= row[x] >= t;
    if (!hit) continue;
    int lo = 0;
    while (!(row[lo] >= t)) ++lo;
    int hi = dims.w - 1;
    while (!(row[hi] >= t)) --hi;
    if (!box) {
      box = RoiBox{lo, hi, y, y, z, z};
    } else {
      box->x_min = std::min(box->x_min, lo);
      box->x_max = std::max(box->x_max, hi);
      box->y_max = y;
    }
  }
  return box;
}

std::uint64_t slice_count_inside(std::span<const float> slice, Dims dims,
                                 const RoiBox& box) {
  std::uint64_t n = 0;
  for (int y = box.y_min; y <= box.y_max; ++y) {
    const float* row = slice.data() + static_cast<std::size_t>(y) * dims.w;
    for (int x = box.x_min; x <= box.x_max; ++x) n += row[x] != 0.0f;
  }
  return n;
}

double slice_sse(std::span<const float> ref, std::span<const float> test,
                 Dims dims, const RoiBox& region, double scale) {
  double sse = 0.0;
  for (int y = region.y_min; y <= region.y_max; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * dims.w;
    for (int x = region.x_min; x <= region.x_max; ++x) {
      const double diff =
          (static_cast<double>(ref[row + x]) - static_cast<double>(test[row + x])) *
          scale;
      sse += diff * diff;
    }
  }
  return sse;
}

namespace {

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> g{};
  double total = 0.0;
  const int r = kSsimWindow / 2;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - r;
    g[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Separable valid-mode Gaussian filter of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h,
                                 const std::array<double, kSsimWindow>& g) {
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> horiz(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += g[k] * in[static_cast<std::size_t>(y) * w + x + k];
      }
      horiz[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += g[k] * horiz[static_cast<std::size_t>(y + k) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

SsimPartial slice_ssim_partial(std::span<const float> ref,
                               std::span<const float> test, Dims dims,
                               const RoiBox& region, double scale) {
  const int w = region.x_max - region.x_min + 1;
  const int h = region.y_max - region.y_min + 1;
  if (w < kSsimWindow || h < kSsimWindow) return {};

  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> a(n), b(n), aa(n), bb(n), ab(n);
  std::size_t i = 0;
  for (int y = region.y_min; y <= region.y_max; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * dims.w;
    for (int x = region.x_min; x <= region.x_max; ++x, ++i) {
      a[i] = static_cast<double>(ref[row + x]) * scale;
      b[i] = static_cast<double>(test[row + x]) * scale;
      aa[i] = a[i] * a[i];
      bb[i] = b[i] * b[i];
      ab[i] = a[i] * b[i];
    }
  }

  static const auto g = gaussian_taps();
  const auto mu_a = filter_valid(a, w, h, g);
  const auto mu_b = filter_valid(b, w, h, g);
  const auto e_aa = filter_valid(aa, w, h, g);
  const auto e_bb = filter_valid(bb, w, h, g);
  const auto e_ab = filter_valid(ab, w, h, g);

  // Dynamic range is 1 after scaling by the reference peak.
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  SsimPartial out;
  for (std::size_t k = 0; k < mu_a.size(); ++k) {
    const double ma = mu_a[k];
    const double mb = mu_b[k];
    const double var_a = e_aa[k] - ma * ma;
    const double var_b = e_bb[k] - mb * mb;
    const double cov = e_ab[k] - ma * mb;
    out.sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  }
  out.windows = mu_a.size();
  return out;
}

std::optional<RoiBox> merge(const std::optional<RoiBox>& a,
                            const std::optional<RoiBox>& b) {
  if (!a) return b;
  if (!b) return a;
  return RoiBox{std::min(a->x_min, b->x_min), std::max(a->x_max, b->x_max),
                std::min(a->y_min, b->y_min), std::max(a->y_max, b->y_max),
                std::min(a->z_min, b->z_min), std::max(a->z_max, b->z_max)};
}

}  // namespace detail

namespace serial {

namespace {
std::span<const float> plane(std::span<const float> data, Dims dims, int z) {
  return data.subspan(static_cast<std::size_t>(z) * dims.slice_voxels(),
                      dims.slice_voxels());
}
}  // namespace

NonzeroSum nonzero_sum(std::span<const float> data, Dims dims) {
  NonzeroSum total;
  for (int z = 0; z < dims.d; ++z) {
    const auto part = detail::slice_nonzero_sum(plane(data, dims, z));
    total.sum += part.sum;
    total.count += part.count;
  }
  return total;
}

std::optional<RoiBox> threshold_bbox(std::span<const float> data, Dims dims,
                                     double tau) {
  std::optional<RoiBox> box;
  for (int z = 0; z < dims.d; ++z) {
    box = detail::merge(box, detail::slice_threshold_bbox(plane(data, dims, z),
                                                          dims, z, tau));
  }
  return box;
}

std::uint64_t count_nonzero_inside(std::span<const float> data, Dims dims,
                                   const RoiBox& box) {
  std::uint64_t n = 0;
  for (int z = box.z_min; z <= box.z_max; ++z) {
    n += detail::slice_count_inside(plane(data, dims, z), dims, box);
  }
  return n;
}

std::vector<double> slice_squared_error(std::span<const float> ref,
                                        std::span<const float> test, Dims dims,
                                        const RoiBox& region, double scale) {
  std::vector<double> out;
  for (int z = region.z_min; z <= region.z_max; ++z) {
    out.push_back(detail::slice_sse(plane(ref, dims, z), plane(test, dims, z),
                                    dims, region, scale));
  }
  return out;
}

std::vector<SsimPartial> slice_ssim(std::span<const float> ref,
                                    std::span<const float> test, Dims dims,
                                    const RoiBox& region, double scale) {
  std::vector<SsimPartial> out;
  for (int z = region.z_min; z <= region.z_max; ++z) {
    out.push_back(detail::slice_ssim_partial(
        plane(ref, dims, z), plane(test, dims, z), dims, region, scale));
  }
  return out;
}

}  // namespace serial

}  // namespace medroi::kernels
