#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "medroi/container.hpp"
#include "medroi/roi_box.hpp"
#include "medroi/types.hpp"

namespace medroi::metrics {

using container::DimMode;
using container::Mode;

// Reported for an exact reconstruction instead of +inf.
inline constexpr double kPsnrCapDb = 100.0;

double compression_ratio(std::uint64_t original_bytes,
                         std::uint64_t archive_bytes);

// Bits over the original voxel count, whatever the mode.
double bits_per_pixel(std::uint64_t archive_bytes, Dims original);

// Normaliser for PSNR/SSIM: the reference maximum, or 1 when it is not
// positive.
double reference_peak(const Volume& reference);

// Intensities are divided by the reference peak. Slice2D averages per-slice
// PSNR over the axial slices of the region; Volume3D uses one MSE over the
// whole region. A zero MSE scores kPsnrCapDb.
double psnr(const Volume& reference, const Volume& test,
            std::optional<RoiBox> region, DimMode dim_mode);

// Gaussian-window SSIM (11x11, sigma 1.5, K1 0.01, K2 0.03, dynamic range 1
// after normalisation) over valid windows of each axial slice. Slice2D
// averages per-slice means; Volume3D pools every window of the region.
// Throws SmallRegion when the region is narrower than the window.
double ssim(const Volume& reference, const Volume& test,
            std::optional<RoiBox> region, DimMode dim_mode);

template <typename T>
struct Timed {
  T value;
  double seconds;
};

// Monotonic wall-clock time of `action`.
template <typename F>
auto timed(F&& action) {
  using R = std::invoke_result_t<F>;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(action)();
    return elapsed();
  } else {
    R value = std::forward<F>(action)();
    const double s = elapsed();
    return Timed<R>{std::move(value), s};
  }
}

struct EvalRecord {
  std::string volume_id;
  std::string codec;
  int quality = 0;
  Mode mode = Mode::Full;
  DimMode dim_mode = DimMode::Slice2D;
  double cr = 0.0;
  double bpp = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double compress_s = 0.0;
  double decompress_s = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "volume_id,codec,quality,mode,dim_mode,cr,bpp,psnr_db,ssim,compress_s,"
    "decompress_s";

std::string to_csv_row(const EvalRecord& r);
void write_csv(const std::vector<EvalRecord>& records, const std::string& path);
// Rejects unknown or missing columns with InvalidArgument.
std::vector<EvalRecord> parse_csv(const std::string& text);
std::vector<EvalRecord> read_csv(const std::string& path);

}  // namespace medroi::metrics
