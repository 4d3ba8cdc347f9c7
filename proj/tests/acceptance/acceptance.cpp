// One PASS/FAIL line per primary acceptance criterion. Exit status is
// nonzero when any criterion fails; a skipped conditional criterion does
// not fail the run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "medroi/codec.hpp"
#include "medroi/container.hpp"
#include "medroi/error.hpp"
#include "medroi/eval.hpp"
#include "medroi/external_codec.hpp"
#include "medroi/metadata.hpp"
#include "medroi/metrics.hpp"
#include "medroi/pipeline.hpp"
#include "medroi/roi.hpp"
#include "medroi/stats.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace medroi;
using container::DimMode;
using container::Mode;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Result {
  Outcome outcome;
  std::string detail;
};

Result pass_if(bool ok, std::string detail) {
  return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)};
}

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

const codec::CodecRegistry& reg() {
  static const auto r = codec::CodecRegistry::with_builtins();
  return r;
}

pipeline::CompressOptions dim_opts(DimMode d) {
  pipeline::CompressOptions o;
  o.dim_mode = d;
  return o;
}

// 1. Metadata record: 54 bytes and exact round trip, 1000 records.
Result metadata_record() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, kMaxDim);
  std::uniform_real_distribution<float> val(-100.0f, 100.0f);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    metadata::RoiMetadata m;
    m.original_shape = {dim(rng), dim(rng), dim(rng)};
    auto span = [&](int n, int& lo, int& hi) {
      std::uniform_int_distribution<int> d(0, n - 1);
      lo = d(rng);
      hi = d(rng);
      if (lo > hi) std::swap(lo, hi);
    };
    span(m.original_shape.w, m.box.x_min, m.box.x_max);
    span(m.original_shape.h, m.box.y_min, m.box.y_max);
    span(m.original_shape.d, m.box.z_min, m.box.z_max);
    for (auto& row : m.rot_scale)
      for (float& f : row) f = val(rng);
    const auto rec = metadata::encode_metadata(m);
    if (rec.size() != 54 || !(metadata::decode_metadata(rec) == m)) ++bad;
  }
  return pass_if(bad == 0, "1000 records, " + std::to_string(bad) + " mismatches");
}

// 2. ROI mechanics on 50 phantoms against brute-force scans.
Result roi_mechanics() {
  int bbox_bad = 0, pad_bad = 0, order_bad = 0, clamp_bad = 0, padded = 0;
  for (int i = 0; i < 50; ++i) {
    const double fraction = 0.3 + 0.7 * (i % 8) / 7.0;
    const double noise = i % 3 == 0 ? 8.0 : 0.0;
    const Volume v = fixture::phantom(100 + i, {40 + i % 5, 36, 24 + i % 4}, fraction, noise);
    const auto r = roi::extract_roi(v);
    const double tau = oracle::nonzero_mean(v);
    const auto tight = oracle::brute_bbox(v, r.tau);
    if (!tight || !(*tight == r.tight_box) || std::fabs(tau - r.tau) > 1e-9 * tau) ++bbox_bad;
    const double miss = static_cast<double>(oracle::nonzero_outside(v, *tight)) /
                        static_cast<double>(oracle::nonzero_count(v));
    const bool should_pad = miss > roi::kMissRateLimit;
    if (should_pad != r.padded || miss != r.pre_pad_miss_rate) ++pad_bad;
    if (r.post_pad_miss_rate > r.pre_pad_miss_rate) ++order_bad;
    if (!r.box.within(v.dims)) ++clamp_bad;
    padded += r.padded;
  }
  return pass_if(bbox_bad + pad_bad + order_bad + clamp_bad == 0,
                 "50 phantoms (" + std::to_string(padded) + " padded); bbox " +
                     std::to_string(bbox_bad) + ", pad rule " + std::to_string(pad_bad) +
                     ", miss order " + std::to_string(order_bad) + ", clamp " +
                     std::to_string(clamp_bad) + " failures");
}

// 3. Lossless ROI round trip on 20 clean and 20 noisy phantoms.
Result lossless_roundtrip() {
  const auto spec = reg().spec("deflate");
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    const DimMode d = i % 2 ? DimMode::Volume3D : DimMode::Slice2D;
    const Volume clean = fixture::phantom(200 + i, {48, 48, 32});
    const auto a = container::deserialize(
        container::serialize(pipeline::compress_roi(clean, spec, dim_opts(d), reg())));
    if (pipeline::decompress(a, reg()).data != clean.data) ++bad;

    const Volume noisy = fixture::phantom(200 + i, {48, 48, 32}, 0.5, 30.0);
    const auto n = container::deserialize(
        container::serialize(pipeline::compress_roi(noisy, spec, dim_opts(d), reg())));
    const Volume back = pipeline::decompress(n, reg());
    const RoiBox box = n.metadata->box;
    bool ok = true;
    for (int z = 0; z < noisy.dims.d && ok; ++z)
      for (int y = 0; y < noisy.dims.h && ok; ++y)
        for (int x = 0; x < noisy.dims.w && ok; ++x) {
          ok = back.at(x, y, z) == (box.contains(x, y, z) ? noisy.at(x, y, z) : 0.0f);
        }
    bad += !ok;
  }
  return pass_if(bad == 0, "40 volumes (20 clean, 20 noisy), " + std::to_string(bad) +
                               " mismatches");
}

struct CorpusRun {
  std::vector<metrics::EvalRecord> records;
};

// Shared corpus for the CR and timing criteria: 20 phantoms at fraction
// 0.5 over a noisy background, every built-in codec, both dims and modes.
const CorpusRun& corpus_run() {
  static const CorpusRun run = [] {
    PhantomSpec base;
    base.dims = {64, 64, 48};
    base.tissue_fraction = 0.5;
    base.noise_amplitude = 30.0;
    const auto corpus = eval::synthetic_corpus(20, 300, base);
    eval::EvalOptions o;
    o.codecs = {"raw", "deflate", "quant"};
    o.repeats = 3;
    o.jobs = 1;
    return CorpusRun{eval::evaluate_corpus(corpus, o, reg())};
  }();
  return run;
}

std::vector<double> column(const std::vector<metrics::EvalRecord>& recs, const std::string& codec,
                           DimMode d, Mode m, double metrics::EvalRecord::*field) {
  std::vector<double> out;
  for (const auto& r : recs) {
    if (r.codec == codec && r.dim_mode == d && r.mode == m) out.push_back(r.*field);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 4. CR gain with the lossless codec.
Result cr_gain() {
  const auto& recs = corpus_run().records;
  std::vector<double> ratios, raw_p;
  for (DimMode d : {DimMode::Slice2D, DimMode::Volume3D}) {
    const auto full = column(recs, "deflate", d, Mode::Full, &metrics::EvalRecord::cr);
    const auto roi = column(recs, "deflate", d, Mode::Roi, &metrics::EvalRecord::cr);
    ratios.push_back(mean(roi) / mean(full));
    raw_p.push_back(stats::paired_t_test(roi, full).p);
  }
  const auto adj = stats::holm_correction(raw_p);
  bool ok = true;
  std::string detail = "deflate, 20 noisy-background phantoms:";
  for (int i = 0; i < 2; ++i) {
    ok = ok && ratios[i] >= 1.2 && adj[i] < 0.05;
    detail += std::string(i ? "; 3d" : " 2d") + " ratio " + num(ratios[i]) + " p_holm " +
              num(adj[i], 3);
  }

  // Zero background, reported for reference only.
  std::vector<double> zf, zr;
  for (int i = 0; i < 20; ++i) {
    const Volume v = fixture::phantom(300 + i, {64, 64, 48});
    const auto spec = reg().spec("deflate");
    zf.push_back(metrics::compression_ratio(
        v.source_byte_len, container::serialize(pipeline::compress_full(v, spec, {}, reg())).size()));
    zr.push_back(metrics::compression_ratio(
        v.source_byte_len, container::serialize(pipeline::compress_roi(v, spec, {}, reg())).size()));
  }
  detail += " (zero background, informational: ratio " + num(mean(zr) / mean(zf)) + ")";
  return pass_if(ok, detail);
}

// 5. Timing direction on the same corpus.
Result timing_direction() {
  const auto& recs = corpus_run().records;
  bool ok = true;
  std::string detail;
  for (const char* codec : {"raw", "deflate", "quant"}) {
    for (DimMode d : {DimMode::Slice2D, DimMode::Volume3D}) {
      for (auto field : {&metrics::EvalRecord::compress_s, &metrics::EvalRecord::decompress_s}) {
        const auto full = column(recs, codec, d, Mode::Full, field);
        const auto roi = column(recs, codec, d, Mode::Roi, field);
        const bool dir = median(roi) <= median(full);
        ok = ok && dir;
        const auto t = stats::paired_t_test(roi, full);
        if (!dir || field == &metrics::EvalRecord::compress_s) {
          detail += std::string(detail.empty() ? "" : "; ") + codec + "/" +
                    std::string(container::dim_mode_name(d)) +
                    (field == &metrics::EvalRecord::compress_s ? " comp " : " decomp ") +
                    num(median(roi) * 1e3, 3) + "<=" + num(median(full) * 1e3, 3) + "ms p " +
                    num(t.p, 2);
        }
      }
    }
  }
  return pass_if(ok, detail);
}

// 6. Rate-distortion shape of the quantiser.
Result rate_distortion() {
  const Volume v = fixture::phantom(1, {64, 64, 48});
  bool ok = true;
  std::string detail;
  for (DimMode d : {DimMode::Slice2D, DimMode::Volume3D}) {
    double prev_psnr[2] = {-1, -1}, prev_cr[2] = {1e300, 1e300};
    int violations = 0;
    for (int q = 1; q <= 8; ++q) {
      double cr[2], psnr[2];
      for (Mode m : {Mode::Full, Mode::Roi}) {
        const eval::Configuration cfg{reg().spec("quant", q), m, d};
        const auto r = eval::evaluate_one({"fixed", v}, cfg, 1, reg());
        const int k = m == Mode::Roi;
        cr[k] = r.cr;
        psnr[k] = r.psnr_db;
        if (!(psnr[k] > prev_psnr[k]) || !(cr[k] < prev_cr[k])) ++violations;
        prev_psnr[k] = psnr[k];
        prev_cr[k] = cr[k];
      }
      if (cr[1] < cr[0]) ++violations;
      if (q == 1 || q == 8) {
        detail += std::string(detail.empty() ? "" : "; ") +
                  std::string(container::dim_mode_name(d)) + " q" + std::to_string(q) +
                  " CR full/roi " + num(cr[0]) + "/" + num(cr[1]) + " PSNR " + num(psnr[0]) +
                  "/" + num(psnr[1]);
      }
    }
    ok = ok && violations == 0;
  }
  return pass_if(ok, detail);
}

// 7. Metric oracles on five constructed cases.
Result metric_oracles() {
  double worst_psnr = 0, worst_ssim = 0;
  auto track = [](double& worst, double got, double want) {
    worst = std::max(worst, std::fabs(got - want));
  };
  using metrics::psnr;
  using metrics::ssim;
  // (a) constructed pair, whole volume: frozen scikit-image values.
  auto [ref, test] = fixture::constructed_pair();
  track(worst_psnr, psnr(ref, test, {}, DimMode::Slice2D), 21.12372659435711);
  track(worst_psnr, psnr(ref, test, {}, DimMode::Volume3D), 21.117575973985893);
  track(worst_ssim, ssim(ref, test, {}, DimMode::Slice2D), 0.9599740425371358);
  track(worst_ssim, ssim(ref, test, {}, DimMode::Volume3D), 0.9599740425371359);
  // (b) same pair restricted to a sub-box.
  const RoiBox box{2, 14, 1, 12, 1, 2};
  track(worst_psnr, psnr(ref, test, box, DimMode::Slice2D), 21.157266392972588);
  track(worst_psnr, psnr(ref, test, box, DimMode::Volume3D), 21.15643137184731);
  track(worst_ssim, ssim(ref, test, box, DimMode::Slice2D), 0.9602077023772648);
  // (c) flat mid-gray against the structured reference.
  Volume flat = ref;
  std::fill(flat.data.begin(), flat.data.end(), 8.0f);
  track(worst_ssim, ssim(ref, flat, {}, DimMode::Slice2D), 0.009527813105022506);
  // (d) quantised phantom against the naive double-precision oracles.
  const Volume v = fixture::phantom(1, {40, 40, 24});
  const Volume q = pipeline::decompress(
      pipeline::compress_full(v, reg().spec("quant", 4), {}, reg()), reg());
  const RoiBox full = RoiBox::full(v.dims);
  track(worst_psnr, psnr(v, q, {}, DimMode::Slice2D), oracle::psnr2d(v, q, full));
  track(worst_psnr, psnr(v, q, {}, DimMode::Volume3D), oracle::psnr3d(v, q, full));
  track(worst_ssim, ssim(v, q, {}, DimMode::Slice2D), oracle::ssim2d(v, q, full));
  track(worst_ssim, ssim(v, q, {}, DimMode::Volume3D), oracle::ssim3d(v, q, full));
  // (e) identical volumes.
  track(worst_psnr, psnr(v, v, {}, DimMode::Slice2D), metrics::kPsnrCapDb);
  track(worst_ssim, ssim(v, v, {}, DimMode::Volume3D), 1.0);

  const bool exact = metrics::compression_ratio(1000, 250) == 4.0 &&
                     metrics::compression_ratio(777, 777) == 1.0 &&
                     metrics::bits_per_pixel(8, {8, 8, 8}) == 0.125 &&
                     metrics::bits_per_pixel(3000, {10, 20, 30}) == 4.0;
  return pass_if(worst_psnr <= 1e-8 && worst_ssim <= 1e-8 && exact,
                 "max |dPSNR| " + num(worst_psnr, 3) + " dB, max |dSSIM| " +
                     num(worst_ssim, 3) + ", CR/BPP exact " + (exact ? "yes" : "no"));
}

// 8. Statistics oracles.
Result stats_oracles() {
  double worst = 0;
  const std::vector<double> a{2.1, 1.9, 2.3, 2.5, 1.8}, b{1.5, 1.4, 1.9, 2.0, 1.3};
  const auto t = stats::paired_t_test(a, b);
  worst = std::max({worst, std::fabs(t.t - 15.811388300841884),
                    std::fabs(t.p - 9.349274639994492e-05)});
  const auto h = stats::holm_correction(std::vector<double>{0.01, 0.04, 0.03});
  const double he[] = {0.03, 0.06, 0.06};
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::fabs(h[i] - he[i]));
  const auto h5 = stats::holm_correction(std::vector<double>{0.2, 0.001, 0.5, 0.01, 0.03});
  const double h5e[] = {0.4, 0.005, 0.5, 0.04, 0.09};
  for (int i = 0; i < 5; ++i) worst = std::max(worst, std::fabs(h5[i] - h5e[i]));
  const double tails[][3] = {{1, 2, 0.2951672353008664},
                             {5, 2, 0.10193947882985828},
                             {30, 3, 0.005389964065651944}};
  for (const auto& r : tails) {
    worst = std::max(worst, std::fabs(stats::student_t_two_sided_p(r[1], r[0]) - r[2]));
  }
  const bool degenerate = stats::paired_t_test(a, a).p == 1.0 &&
                          stats::paired_t_test(std::vector<double>{2, 3, 4},
                                               std::vector<double>{1, 2, 3})
                              .degenerate;
  return pass_if(worst <= 1e-8 && degenerate, "max deviation " + num(worst, 3));
}

// 9. Every truncation of a small archive raises a structured error.
Result container_fuzz() {
  const Volume v = fixture::phantom(9, {24, 20, 12});
  const auto bytes = container::serialize(
      pipeline::compress_roi(v, reg().spec("deflate"), dim_opts(DimMode::Slice2D), reg()));
  std::size_t structured = 0, accepted = 0, other = 0;
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    try {
      container::deserialize(std::span(bytes).first(n));
      ++accepted;
    } catch (const Error&) {
      ++structured;
    } catch (...) {
      ++other;
    }
  }
  // Single-byte corruption must also end in a structured outcome.
  std::mt19937 rng(4);
  std::size_t corrupt_other = 0;
  for (int i = 0; i < 2000; ++i) {
    auto c = bytes;
    c[rng() % c.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try {
      pipeline::decompress(container::deserialize(c), reg());
    } catch (const Error&) {
    } catch (...) {
      ++corrupt_other;
    }
  }
  return pass_if(accepted == 0 && other == 0 && corrupt_other == 0,
                 std::to_string(bytes.size()) + " truncations: " + std::to_string(structured) +
                     " structured errors, " + std::to_string(accepted) + " accepted, " +
                     std::to_string(other) + " unstructured; 2000 corruptions, " +
                     std::to_string(corrupt_other) + " unstructured");
}

bool have_j2k_encoder() {
  return std::system("python3 -c 'from PIL import features; import sys; "
                     "sys.exit(0 if features.check(\"jpg_2000\") else 1)' >/dev/null 2>&1") == 0;
}

// 10. JPEG 2000 through the external adapter, when available.
Result external_j2k() {
  if (!have_j2k_encoder()) {
    return {Outcome::Skip, "no JPEG 2000 encoder (python3 + Pillow/OpenJPEG) in this environment"};
  }
  using namespace std::chrono_literals;
  const std::string script = std::string(MEDROI_TOOLS_DIR) + "/mrf_j2k.py";
  codec::CodecRegistry r = codec::CodecRegistry::with_builtins();
  r.add(std::make_shared<codec::external::ExternalCodec>(
      "j2k", codec::external::ExternalCommand{"python3 " + script + " encode {quality}",
                                              "python3 " + script + " decode", 60'000ms, false}));

  const Volume big = fixture::phantom(5, {256, 256, 16});
  Slice s{256, 256, big.dtype, std::vector<float>(big.slice(8).begin(), big.slice(8).end())};
  const auto lossless = r.spec("j2k", 0);
  const bool exact =
      codec::decode_slice(r, lossless, codec::encode_slice(r, lossless, s)).data == s.data;
  const auto lossy = r.spec("j2k", 20);
  const auto p = codec::encode_slice(r, lossy, s);
  const Slice back = codec::decode_slice(r, lossy, p);
  double se = 0;
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    const double d = (s.data[i] - back.data[i]) / 1000.0;
    se += d * d;
  }
  const double psnr = -10 * std::log10(std::max(se / s.data.size(), 1e-10));
  const double slice_cr = static_cast<double>(s.data.size() * 2) / p.bytes.size();

  const Volume v = fixture::phantom(6, {96, 96, 32}, 0.5);
  const auto full = container::serialize(pipeline::compress_full(v, lossy, {}, r));
  const auto roi = container::serialize(pipeline::compress_roi(v, lossy, {}, r));
  const double cr_full = metrics::compression_ratio(v.source_byte_len, full.size());
  const double cr_roi = metrics::compression_ratio(v.source_byte_len, roi.size());
  return pass_if(exact && std::isfinite(psnr) && slice_cr > 1 && cr_roi > cr_full,
                 "256x256 lossless exact " + std::string(exact ? "yes" : "no") + ", rate 20 CR " +
                     num(slice_cr) + " PSNR " + num(psnr) + " dB; phantom CR full " +
                     num(cr_full) + " roi " + num(cr_roi));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Result()> run;
  };
  const Criterion criteria[] = {
      {"metadata-54-byte-record", metadata_record},
      {"roi-mechanics", roi_mechanics},
      {"lossless-roundtrip", lossless_roundtrip},
      {"cr-gain", cr_gain},
      {"timing-direction", timing_direction},
      {"rate-distortion-shape", rate_distortion},
      {"metric-oracles", metric_oracles},
      {"statistics-oracles", stats_oracles},
      {"container-fuzz", container_fuzz},
      {"external-jpeg2000", external_j2k},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = r.outcome == Outcome::Pass ? "PASS" : r.outcome == Outcome::Fail ? "FAIL" : "SKIP";
    std::printf("%s %-24s %s [%.2fs]\n", tag, c.name, r.detail.c_str(), s);
    std::fflush(stdout);
    failed += r.outcome == Outcome::Fail;
  }
  return failed == 0 ? 0 : 1;
}
