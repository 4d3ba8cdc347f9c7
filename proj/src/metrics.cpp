#include "medroi/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "medroi/byte_io.hpp"
#include "medroi/error.hpp"
#include "medroi/kernels.hpp"

namespace medroi::metrics {

namespace {

// Compensated sum, always accumulated in index order.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - carry_;
    const double t = total_ + y;
    carry_ = (t - total_) - y;
    total_ = t;
  }
  double value() const { return total_; }

 private:
  double total_ = 0.0;
  double carry_ = 0.0;
};

RoiBox checked_region(const Volume& ref, const Volume& test,
                      const std::optional<RoiBox>& region) {
  if (ref.dims != test.dims || ref.data.size() != test.data.size()) {
    throw Error(ErrorCode::DimensionMismatch, "reference and test dims differ");
  }
  const RoiBox box = region.value_or(RoiBox::full(ref.dims));
  if (!box.within(ref.dims)) {
    throw Error(ErrorCode::DimensionMismatch, "region lies outside the volume");
  }
  return box;
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCapDb;
  return -10.0 * std::log10(mse);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s, const std::string& column) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "bad number '" + std::string(s) + "' in column " + column);
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

double compression_ratio(std::uint64_t original_bytes,
                         std::uint64_t archive_bytes) {
  if (original_bytes == 0 || archive_bytes == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "compression ratio needs positive byte counts");
  }
  return static_cast<double>(original_bytes) / static_cast<double>(archive_bytes);
}

double bits_per_pixel(std::uint64_t archive_bytes, Dims original) {
  if (original.voxels() == 0) {
    throw Error(ErrorCode::InvalidArgument, "empty volume");
  }
  return 8.0 * static_cast<double>(archive_bytes) /
         static_cast<double>(original.voxels());
}

double reference_peak(const Volume& reference) {
  if (reference.data.empty()) return 1.0;
  const float peak = *std::max_element(reference.data.begin(), reference.data.end());
  return peak > 0.0f ? static_cast<double>(peak) : 1.0;
}

double psnr(const Volume& reference, const Volume& test,
            std::optional<RoiBox> region, DimMode dim_mode) {
  const RoiBox box = checked_region(reference, test, region);
  const double scale = 1.0 / reference_peak(reference);
  const auto sse = kernels::omp::slice_squared_error(reference.data, test.data,
                                                     reference.dims, box, scale);
  const auto plane = static_cast<double>(box.extent().slice_voxels());

  if (dim_mode == DimMode::Volume3D) {
    KahanSum total;
    for (double s : sse) total.add(s);
    return psnr_from_mse(total.value() / (plane * static_cast<double>(sse.size())));
  }
  KahanSum total;
  for (double s : sse) total.add(psnr_from_mse(s / plane));
  return total.value() / static_cast<double>(sse.size());
}

double ssim(const Volume& reference, const Volume& test,
            std::optional<RoiBox> region, DimMode dim_mode) {
  const RoiBox box = checked_region(reference, test, region);
  const Dims e = box.extent();
  if (e.w < kernels::kSsimWindow || e.h < kernels::kSsimWindow) {
    throw Error(ErrorCode::SmallRegion,
                "region " + std::to_string(e.w) + "x" + std::to_string(e.h) +
                    " is smaller than the 11x11 SSIM window");
  }
  const double scale = 1.0 / reference_peak(reference);
  const auto parts = kernels::omp::slice_ssim(reference.data, test.data,
                                              reference.dims, box, scale);
  if (dim_mode == DimMode::Volume3D) {
    KahanSum total;
    std::uint64_t windows = 0;
    for (const auto& p : parts) {
      total.add(p.sum);
      windows += p.windows;
    }
    return total.value() / static_cast<double>(windows);
  }
  KahanSum total;
  for (const auto& p : parts) total.add(p.sum / static_cast<double>(p.windows));
  return total.value() / static_cast<double>(parts.size());
}

std::string to_csv_row(const EvalRecord& r) {
  std::string row;
  row += r.volume_id + ',' + r.codec + ',' + std::to_string(r.quality) + ',';
  row += std::string(container::mode_name(r.mode)) + ',';
  row += std::string(container::dim_mode_name(r.dim_mode)) + ',';
  for (double v : {r.cr, r.bpp, r.psnr_db, r.ssim, r.compress_s}) {
    row += format_double(v) + ',';
  }
  row += format_double(r.decompress_s);
  return row;
}

void write_csv(const std::vector<EvalRecord>& records, const std::string& path) {
  std::string text(kCsvHeader);
  text += '\n';
  for (const auto& r : records) text += to_csv_row(r) + '\n';
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

std::vector<EvalRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::InvalidArgument, "empty CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto expected = split(std::string(kCsvHeader), ',');
  const auto header = split(line, ',');
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(expected.begin(), expected.end(), header[i]) == expected.end()) {
      throw Error(ErrorCode::InvalidArgument, "unknown CSV column '" + header[i] + "'");
    }
    column[header[i]] = i;
  }
  for (const auto& name : expected) {
    if (!column.count(name)) {
      throw Error(ErrorCode::InvalidArgument, "missing CSV column '" + name + "'");
    }
  }

  std::vector<EvalRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "CSV line " + std::to_string(line_no) + " has " +
                      std::to_string(f.size()) + " fields");
    }
    auto get = [&](const char* name) -> const std::string& { return f[column[name]]; };
    EvalRecord r;
    r.volume_id = get("volume_id");
    r.codec = get("codec");
    r.quality = static_cast<int>(parse_double(get("quality"), "quality"));
    const auto& mode = get("mode");
    if (mode != "full" && mode != "roi") {
      throw Error(ErrorCode::InvalidArgument, "bad mode '" + mode + "'");
    }
    r.mode = mode == "full" ? Mode::Full : Mode::Roi;
    const auto& dim = get("dim_mode");
    if (dim != "2d" && dim != "3d") {
      throw Error(ErrorCode::InvalidArgument, "bad dim_mode '" + dim + "'");
    }
    r.dim_mode = dim == "2d" ? DimMode::Slice2D : DimMode::Volume3D;
    r.cr = parse_double(get("cr"), "cr");
    r.bpp = parse_double(get("bpp"), "bpp");
    r.psnr_db = parse_double(get("psnr_db"), "psnr_db");
    r.ssim = parse_double(get("ssim"), "ssim");
    r.compress_s = parse_double(get("compress_s"), "compress_s");
    r.decompress_s = parse_double(get("decompress_s"), "decompress_s");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EvalRecord> read_csv(const std::string& path) {
  const auto bytes = read_file(path);
  return parse_csv(std::string(bytes.begin(), bytes.end()));
}

}  // namespace medroi::metrics
