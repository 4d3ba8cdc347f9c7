#pragma once

#include <string>
#include <vector>

#include "medroi/codec.hpp"
#include "medroi/metrics.hpp"
#include "medroi/phantom.hpp"

namespace medroi::eval {

using container::DimMode;
using container::Mode;
using metrics::EvalRecord;

struct CorpusEntry {
  std::string id;
  Volume volume;
};

// Every *.nii / *.nii.gz in `dir`, sorted by file name. The id is the file
// name without its extension.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

// `count` phantoms with seeds seed..seed+count-1; ids "phantom_<seed>".
std::vector<CorpusEntry> synthetic_corpus(int count, std::uint64_t seed,
                                          PhantomSpec base = {});

struct Configuration {
  codec::CodecSpec spec;
  Mode mode = Mode::Full;
  DimMode dim_mode = DimMode::Slice2D;
};

struct EvalOptions {
  std::vector<std::string> codecs{"deflate"};
  // Qualities outside a codec's range are dropped for that codec; a codec
  // left with none runs at its fallback quality.
  std::vector<int> qualities;
  std::vector<Mode> modes{Mode::Full, Mode::Roi};
  std::vector<DimMode> dims{DimMode::Slice2D, DimMode::Volume3D};
  int repeats = 1;
  // 0 means one per logical core.
  int jobs = 0;
};

// Codec-major, then quality, dim mode, mode. Dim modes the codec lacks are
// skipped.
std::vector<Configuration> expand_configurations(
    const EvalOptions& options, const codec::CodecRegistry& registry);

// Compress+serialize and deserialize+decompress, timed; the median of
// `repeats` runs is kept. Roi-mode quality is measured inside the ROI box.
EvalRecord evaluate_one(const CorpusEntry& entry, const Configuration& config,
                        int repeats, const codec::CodecRegistry& registry);

// Volume-major rows in corpus order, then configuration order.
std::vector<EvalRecord> evaluate_corpus(const std::vector<CorpusEntry>& corpus,
                                        const EvalOptions& options,
                                        const codec::CodecRegistry& registry);

// Per-configuration means.
struct SummaryRow {
  std::string codec;
  int quality = 0;
  Mode mode = Mode::Full;
  DimMode dim_mode = DimMode::Slice2D;
  std::size_t n = 0;
  double cr = 0, bpp = 0, psnr_db = 0, ssim = 0, compress_s = 0, decompress_s = 0;
};
std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records);

// Roi versus Full on one metric for one codec configuration, paired by
// volume id. `codec` reads "<id>:q<quality>:<dim>".
struct SignificanceRow {
  std::string metric;
  std::string codec;
  std::size_t pairs = 0;
  double t = 0, p_raw = 1, p_adjusted = 1;
  bool significant = false;
};

inline constexpr double kAlpha = 0.05;

// Holm (or Bonferroni) runs per metric across codec configurations.
std::vector<SignificanceRow> significance(const std::vector<EvalRecord>& records,
                                          bool bonferroni = false);

// summary.csv, rd_points.dat, rd_plot.gp and significance.csv in `out_dir`.
void write_report(const std::vector<EvalRecord>& records, const std::string& out_dir,
                  bool bonferroni = false);

}  // namespace medroi::eval
