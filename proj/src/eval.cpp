#include "medroi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>


#include "medroi/byte_io.hpp"
#include "medroi/container.hpp"
#include "medroi/error.hpp"
#include "medroi/nifti_io.hpp"
#include "medroi/pipeline.hpp"
#include "medroi/roi.hpp"
#include "medroi/stats.hpp"

namespace medroi::eval {

namespace fs = std::filesystem;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Mean of the finite values; NaN when there are none.
double finite_mean(const std::vector<double>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      sum += x;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string config_label(const std::string& codec, int quality, DimMode dim) {
  return codec + ":q" + std::to_string(quality) + ":" +
         std::string(container::dim_mode_name(dim));
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path.string(), std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                      text.size()));
}

std::string strip_extension(const std::string& name) {
  for (const char* ext : {".nii.gz", ".nii"}) {
    const std::string e(ext);
    if (name.size() > e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0) {
      return name.substr(0, name.size() - e.size());
    }
  }
  return name;
}

}  // namespace

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::Io, "corpus directory '" + dir + "' not found");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (strip_extension(name) != name) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> corpus;
  corpus.reserve(files.size());
  for (const auto& f : files) {
    corpus.push_back({strip_extension(f.filename().string()), nifti::read_nifti(f.string())});
  }
  return corpus;
}

std::vector<CorpusEntry> synthetic_corpus(int count, std::uint64_t seed,
                                          PhantomSpec base) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "negative corpus size");
  std::vector<CorpusEntry> corpus(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    PhantomSpec s = base;
    s.seed = seed + static_cast<std::uint64_t>(i);
    corpus[i] = {"phantom_" + std::to_string(s.seed), generate_phantom(s)};
  }
  return corpus;
}

std::vector<Configuration> expand_configurations(
    const EvalOptions& options, const codec::CodecRegistry& registry) {
  std::vector<Configuration> out;
  for (const auto& id : options.codecs) {
    const codec::Codec& c = registry.resolve(id);
    const auto range = c.quality_range();
    std::vector<int> qs;
    for (int q : options.qualities) {
      if (range.contains(q) && std::find(qs.begin(), qs.end(), q) == qs.end()) {
        qs.push_back(q);
      }
    }
    if (qs.empty()) qs.push_back(range.fallback);
    for (int q : qs) {
      const codec::CodecSpec spec = registry.spec(id, q);
      for (DimMode dim : options.dims) {
        if (dim == DimMode::Slice2D && !spec.slice2d) continue;
        if (dim == DimMode::Volume3D && !spec.volume3d) continue;
        for (Mode mode : options.modes) out.push_back({spec, mode, dim});
      }
    }
  }
  return out;
}

EvalRecord evaluate_one(const CorpusEntry& entry, const Configuration& config,
                        int repeats, const codec::CodecRegistry& registry) {
  if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");
  pipeline::CompressOptions opts;
  opts.dim_mode = config.dim_mode;

  std::vector<double> compress_s, decompress_s;
  std::vector<std::uint8_t> bytes;
  Volume restored;
  for (int r = 0; r < repeats; ++r) {
    auto packed = metrics::timed([&] {
      const auto archive = config.mode == Mode::Roi
                               ? pipeline::compress_roi(entry.volume, config.spec, opts, registry)
                               : pipeline::compress_full(entry.volume, config.spec, opts, registry);
      return container::serialize(archive);
    });
    auto unpacked = metrics::timed([&] {
      return pipeline::decompress(container::deserialize(packed.value), registry);
    });
    compress_s.push_back(packed.seconds);
    decompress_s.push_back(unpacked.seconds);
    bytes = std::move(packed.value);
    restored = std::move(unpacked.value);
  }

  std::optional<RoiBox> region;
  if (config.mode == Mode::Roi) {
    region = container::deserialize(bytes).encoded_region();
  }

  EvalRecord rec;
  rec.volume_id = entry.id;
  rec.codec = config.spec.id;
  rec.quality = config.spec.quality;
  rec.mode = config.mode;
  rec.dim_mode = config.dim_mode;
  rec.cr = metrics::compression_ratio(entry.volume.source_byte_len, bytes.size());
  rec.bpp = metrics::bits_per_pixel(bytes.size(), entry.volume.dims);
  rec.psnr_db = metrics::psnr(entry.volume, restored, region, config.dim_mode);
  try {
    rec.ssim = metrics::ssim(entry.volume, restored, region, config.dim_mode);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SmallRegion) throw;
    rec.ssim = std::nan("");
  }
  rec.compress_s = median(compress_s);
  rec.decompress_s = median(decompress_s);
  return rec;
}

std::vector<EvalRecord> evaluate_corpus(const std::vector<CorpusEntry>& corpus,
                                        const EvalOptions& options,
                                        const codec::CodecRegistry& registry) {
  const auto configs = expand_configurations(options, registry);
  const int n = static_cast<int>(corpus.size());
  const int jobs = options.jobs > 0
                       ? options.jobs
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::vector<EvalRecord>> per_volume(corpus.size());
  std::vector<std::exception_ptr> failures(corpus.size());

  // One volume per thread; its configurations run back to back so its
  // timings do not compete with each other.
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int i = 0; i < n; ++i) {
    try {
      for (const auto& c : configs) {
        per_volume[i].push_back(evaluate_one(corpus[i], c, options.repeats, registry));
      }
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), corpus[i].id + ": " + e.what(), static_cast<std::size_t>(i));
    }
  }

  std::vector<EvalRecord> out;
  out.reserve(corpus.size() * configs.size());
  for (auto& rows : per_volume) {
    for (auto& r : rows) out.push_back(std::move(r));
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records) {
  using Key = std::tuple<std::string, int, int, int>;
  std::vector<Key> order;
  std::map<Key, std::vector<const EvalRecord*>> groups;
  for (const auto& r : records) {
    const Key k{r.codec, r.quality, static_cast<int>(r.dim_mode), static_cast<int>(r.mode)};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& g = groups[k];
    auto mean = [&](double EvalRecord::*field) {
      std::vector<double> v;
      for (const auto* r : g) v.push_back(r->*field);
      return finite_mean(v);
    };
    SummaryRow s;
    s.codec = g.front()->codec;
    s.quality = g.front()->quality;
    s.mode = g.front()->mode;
    s.dim_mode = g.front()->dim_mode;
    s.n = g.size();
    s.cr = mean(&EvalRecord::cr);
    s.bpp = mean(&EvalRecord::bpp);
    s.psnr_db = mean(&EvalRecord::psnr_db);
    s.ssim = mean(&EvalRecord::ssim);
    s.compress_s = mean(&EvalRecord::compress_s);
    s.decompress_s = mean(&EvalRecord::decompress_s);
    out.push_back(s);
  }
  return out;
}

std::vector<SignificanceRow> significance(const std::vector<EvalRecord>& records,
                                          bool bonferroni) {
  static const std::vector<std::pair<std::string, double EvalRecord::*>> kMetrics{
      {"cr", &EvalRecord::cr},
      {"compress_s", &EvalRecord::compress_s},
      {"decompress_s", &EvalRecord::decompress_s}};

  // label -> volume id -> (full, roi)
  std::vector<std::string> labels;
  std::map<std::string, std::map<std::string, std::pair<const EvalRecord*, const EvalRecord*>>>
      pairs;
  for (const auto& r : records) {
    const auto label = config_label(r.codec, r.quality, r.dim_mode);
    if (!pairs.count(label)) labels.push_back(label);
    auto& slot = pairs[label][r.volume_id];
    (r.mode == Mode::Full ? slot.first : slot.second) = &r;
  }

  std::vector<SignificanceRow> out;
  for (const auto& [metric, field] : kMetrics) {
    const std::size_t first = out.size();
    std::vector<double> raw;
    for (const auto& label : labels) {
      std::vector<double> roi, full;
      for (const auto& [id, fr] : pairs[label]) {
        if (!fr.first || !fr.second) continue;
        full.push_back(fr.first->*field);
        roi.push_back(fr.second->*field);
      }
      SignificanceRow row;
      row.metric = metric;
      row.codec = label;
      row.pairs = roi.size();
      if (roi.size() >= 2) {
        const auto t = stats::paired_t_test(roi, full);
        row.t = t.t;
        row.p_raw = t.p;
      }
      raw.push_back(row.p_raw);
      out.push_back(row);
    }
    const auto adjusted =
        bonferroni ? stats::bonferroni_correction(raw) : stats::holm_correction(raw);
    for (std::size_t i = 0; i < adjusted.size(); ++i) {
      auto& row = out[first + i];
      row.p_adjusted = adjusted[i];
      row.significant = row.pairs >= 2 && row.p_adjusted < kAlpha;
    }
  }
  return out;
}

void write_report(const std::vector<EvalRecord>& records, const std::string& out_dir,
                  bool bonferroni) {
  const fs::path dir(out_dir);
  const auto summary = summarize(records);

  std::string s =
      "codec,quality,mode,dim_mode,n,cr,bpp,psnr_db,ssim,compress_s,decompress_s\n";
  for (const auto& r : summary) {
    s += r.codec + ',' + std::to_string(r.quality) + ',' +
         std::string(container::mode_name(r.mode)) + ',' +
         std::string(container::dim_mode_name(r.dim_mode)) + ',' + std::to_string(r.n);
    for (double v : {r.cr, r.bpp, r.psnr_db, r.ssim, r.compress_s, r.decompress_s}) {
      s += ',' + fmt(v);
    }
    s += '\n';
  }
  write_text(dir / "summary.csv", s);

  std::string points = "# config mode psnr_db cr marker\n";
  for (const auto& r : summary) {
    points += config_label(r.codec, r.quality, r.dim_mode) + ' ' +
              std::string(container::mode_name(r.mode)) + ' ' + fmt(r.psnr_db) + ' ' +
              fmt(r.cr) + ' ' + (r.mode == Mode::Full ? "7" : "6") + '\n';
  }
  write_text(dir / "rd_points.dat", points);

  write_text(dir / "rd_plot.gp",
             "# gnuplot rd_plot.gp  (filled: full, hollow: roi)\n"
             "set terminal pngcairo size 900,600\n"
             "set output 'rd_plot.png'\n"
             "set xlabel 'Compression ratio'\n"
             "set ylabel 'PSNR (dB)'\n"
             "set key bottom right\n"
             "set grid\n"
             "plot 'rd_points.dat' using (strcol(2) eq 'full' ? $4 : 1/0):3 with points pt 7 "
             "title 'full', \\\n"
             "     '' using (strcol(2) eq 'roi' ? $4 : 1/0):3 with points pt 6 title 'roi'\n");

  std::string sig = "metric,codec,t,p_raw,p_adjusted,significant@0.05\n";
  for (const auto& r : significance(records, bonferroni)) {
    sig += r.metric + ',' + r.codec + ',' + fmt(r.t) + ',' + fmt(r.p_raw) + ',' +
           fmt(r.p_adjusted) + ',' + (r.significant ? "true" : "false") + '\n';
  }
  write_text(dir / "significance.csv", sig);
}

}  // namespace medroi::eval
