// medroi: compress, decompress, phantom, eval and report.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "medroi/byte_io.hpp"
#include "medroi/container.hpp"
#include "medroi/error.hpp"
#include "medroi/eval.hpp"
#include "medroi/metrics.hpp"
#include "medroi/nifti_io.hpp"
#include "medroi/phantom.hpp"
#include "medroi/pipeline.hpp"

using namespace medroi;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitCodec = 4;
constexpr int kExitAllZero = 5;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    case ErrorCode::UnknownCodec:
    case ErrorCode::UnsupportedMode:
    case ErrorCode::EncodeError:
    case ErrorCode::DecodeError:
    case ErrorCode::ExternalCodecError:
      return kExitCodec;
    case ErrorCode::AllZeroVolume:
    case ErrorCode::EmptyTissueSet:
      return kExitAllZero;
    default:
      return kExitIo;
  }
}


Dims parse_dims(const std::string& text) {
  std::string t = text;
  for (char& c : t) {
    if (c == 'x' || c == ',') c = ' ';
  }
  std::istringstream in(t);
  Dims d;
  if (!(in >> d.w >> d.h >> d.d) || !(in >> std::ws).eof()) {
    throw Error(ErrorCode::InvalidArgument, "dims must look like 64x64x64");
  }
  return d;
}

template <typename T>
std::vector<T> choose(const std::string& value, const char* a, const char* b, T ta, T tb,
                      const char* flag) {
  if (value == a) return {ta};
  if (value == b) return {tb};
  if (value == "both") return {ta, tb};
  throw Error(ErrorCode::InvalidArgument,
              std::string(flag) + " must be " + a + ", " + b + " or both");
}

struct CompressArgs {
  std::string input, output, codec = "deflate", mode = "roi", dim = "2d";
  std::optional<int> quality;
  bool exact_affine = false;
};

int run_compress(const CompressArgs& a) {
  const auto& registry = codec::default_registry();
  const codec::CodecSpec spec = registry.spec(a.codec, a.quality);
  const Volume volume = nifti::read_nifti(a.input);
  pipeline::CompressOptions opts;
  opts.dim_mode = a.dim == "3d" ? container::DimMode::Volume3D : container::DimMode::Slice2D;
  opts.exact_affine = a.exact_affine;
  const bool roi = a.mode == "roi";

  auto result = metrics::timed([&] {
    const auto archive = roi ? pipeline::compress_roi(volume, spec, opts, registry)
                             : pipeline::compress_full(volume, spec, opts, registry);
    return container::serialize(archive);
  });
  write_file(a.output, result.value);
  std::printf("mode=%s cr=%.4f bytes=%zu seconds=%.6f\n", roi ? "roi" : "full",
              metrics::compression_ratio(volume.source_byte_len, result.value.size()),
              result.value.size(), result.seconds);
  return 0;
}

int run_decompress(const std::string& input, const std::string& output) {
  const auto bytes = read_file(input);
  const Volume v = pipeline::decompress(container::deserialize(bytes));
  nifti::write_nifti(v, output);
  return 0;
}

struct PhantomArgs {
  std::uint64_t seed = 1;
  std::string dims = "64x64x64";
  double tissue_fraction = 0.5;
  double noise = 0.0;
  int count = 1;
  std::string out_dir;
};

int run_phantom(const PhantomArgs& a) {
  PhantomSpec spec;
  spec.dims = parse_dims(a.dims);
  spec.tissue_fraction = a.tissue_fraction;
  spec.noise_amplitude = a.noise;
  for (int i = 0; i < a.count; ++i) {
    spec.seed = a.seed + static_cast<std::uint64_t>(i);
    const auto path = std::filesystem::path(a.out_dir) /
                      ("phantom_" + std::to_string(spec.seed) + ".nii");
    nifti::write_nifti(generate_phantom(spec), path.string());
  }
  return 0;
}

struct EvalArgs {
  std::string corpus, out = "results.csv", modes = "both", dims = "both";
  std::vector<std::string> codecs{"deflate"};
  std::vector<int> qualities;
  std::uint64_t seed = 1;
  int repeats = 1, jobs = 0, synthetic = 0;
  std::string phantom_dims = "64x64x64";
  double tissue_fraction = 0.5, noise = 0.0;
};

int run_eval(const EvalArgs& a) {
  eval::EvalOptions opts;
  opts.codecs = a.codecs;
  opts.qualities = a.qualities;
  opts.modes = choose(a.modes, "full", "roi", container::Mode::Full, container::Mode::Roi,
                      "--modes");
  opts.dims = choose(a.dims, "2d", "3d", container::DimMode::Slice2D,
                     container::DimMode::Volume3D, "--dims");
  opts.repeats = a.repeats;
  opts.jobs = a.jobs;

  std::vector<eval::CorpusEntry> corpus;
  if (a.synthetic > 0) {
    PhantomSpec base;
    base.dims = parse_dims(a.phantom_dims);
    base.tissue_fraction = a.tissue_fraction;
    base.noise_amplitude = a.noise;
    corpus = eval::synthetic_corpus(a.synthetic, a.seed, base);
  } else if (!a.corpus.empty()) {
    corpus = eval::load_corpus(a.corpus);
  } else {
    throw Error(ErrorCode::InvalidArgument, "give a corpus directory or --synthetic N");
  }
  if (corpus.empty()) throw Error(ErrorCode::Io, "corpus holds no NIfTI volumes");

  const auto records = eval::evaluate_corpus(corpus, opts, codec::default_registry());
  metrics::write_csv(records, a.out);
  std::printf("%zu records from %zu volumes -> %s\n", records.size(), corpus.size(),
              a.out.c_str());
  return 0;
}

int run_report(const std::string& csv, const std::string& out_dir, bool bonferroni) {
  const auto records = metrics::read_csv(csv);
  eval::write_report(records, out_dir, bonferroni);
  std::printf("report for %zu records -> %s\n", records.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ROI-centric compression for 3D medical volumes"};
  app.set_config("--config", "", "TOML file of option values; flags win");
  app.require_subcommand(1);

  CompressArgs ca;
  auto* compress = app.add_subcommand("compress", "NIfTI -> .mroi archive");
  compress->add_option("input", ca.input, "Input NIfTI")->required();
  compress->add_option("output", ca.output, "Output archive")->required();
  compress->add_option("--codec", ca.codec, "Codec id");
  compress->add_option("--quality", ca.quality, "Codec quality");
  compress->add_option("--mode", ca.mode)->check(CLI::IsMember({"full", "roi"}));
  compress->add_option("--dim", ca.dim)->check(CLI::IsMember({"2d", "3d"}));
  compress->add_flag("--exact-affine", ca.exact_affine, "Store the exact translation too");

  std::string din, dout;
  auto* decompress = app.add_subcommand("decompress", ".mroi archive -> NIfTI");
  decompress->add_option("input", din)->required();
  decompress->add_option("output", dout)->required();

  PhantomArgs pa;
  auto* phantom = app.add_subcommand("phantom", "Write seeded phantom volumes");
  phantom->add_option("out_dir", pa.out_dir)->required();
  phantom->add_option("--seed", pa.seed);
  phantom->add_option("--dims", pa.dims, "WxHxD");
  phantom->add_option("--tissue-fraction", pa.tissue_fraction);
  phantom->add_option("--noise", pa.noise, "Background noise amplitude");
  phantom->add_option("--count", pa.count)->check(CLI::PositiveNumber);

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Evaluate a corpus into a CSV");
  ev->add_option("corpus", ea.corpus, "Directory of NIfTI volumes");
  ev->add_option("--synthetic", ea.synthetic, "Use N in-memory phantoms instead");
  ev->add_option("--codecs", ea.codecs)->delimiter(',');
  ev->add_option("--qualities", ea.qualities)->delimiter(',');
  ev->add_option("--modes", ea.modes, "full, roi or both");
  ev->add_option("--dims", ea.dims, "2d, 3d or both");
  ev->add_option("--out", ea.out, "CSV path");
  ev->add_option("--seed", ea.seed, "First phantom seed");
  ev->add_option("--repeats", ea.repeats)->check(CLI::PositiveNumber);
  ev->add_option("--jobs", ea.jobs, "Parallel volumes (0: all cores)");
  ev->add_option("--phantom-dims", ea.phantom_dims);
  ev->add_option("--tissue-fraction", ea.tissue_fraction);
  ev->add_option("--noise", ea.noise);

  std::string rcsv, rout = "report";
  bool bonferroni = false;
  auto* report = app.add_subcommand("report", "Summary, RD data and significance");
  report->add_option("csv", rcsv)->required();
  report->add_option("--out", rout, "Output directory");
  report->add_flag("--bonferroni", bonferroni, "Bonferroni instead of Holm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*compress) return run_compress(ca);
    if (*decompress) return run_decompress(din, dout);
    if (*phantom) return run_phantom(pa);
    if (*ev) return run_eval(ea);
    if (*report) return run_report(rcsv, rout, bonferroni);
  } catch (const Error& e) {
    std::fprintf(stderr, "medroi: %s\n", e.what());
    if (e.code() == ErrorCode::AllZeroVolume || e.code() == ErrorCode::EmptyTissueSet) {
      std::fprintf(stderr, "hint: the volume has no tissue to crop to; use --mode full\n");
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "medroi: %s\n", e.what());
    return 1;
  }
  return kExitUsage;
}
