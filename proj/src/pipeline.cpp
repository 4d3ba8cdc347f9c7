#include "medroi/pipeline.hpp"

#include <cstring>
#include <exception>

#include "medroi/error.hpp"
#include "medroi/metadata.hpp"

namespace medroi::pipeline {

namespace {

void check_mode_support(const codec::CodecSpec& spec, DimMode dim) {
  if (dim == DimMode::Slice2D && !spec.slice2d) {
    throw Error(ErrorCode::UnsupportedMode, spec.id + " has no 2D slice mode");
  }
  if (dim == DimMode::Volume3D && !spec.volume3d) {
    throw Error(ErrorCode::UnsupportedMode, spec.id + " has no 3D volume mode");
  }
}

// Runs body(i) for i in [0, n) across threads and rethrows the failure with
// the lowest index, tagged with that index.
template <typename Body>
void for_each_slice(int n, Body&& body) {
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "slice " + std::to_string(i) + ": " + e.what(),
                  static_cast<std::size_t>(i));
    }
  }
}

std::vector<std::vector<std::uint8_t>> encode_region(
    const Volume& region, const codec::CodecSpec& spec, DimMode dim,
    const codec::CodecRegistry& registry) {
  if (dim == DimMode::Volume3D) {
    return {codec::encode_volume(registry, spec, region).bytes};
  }
  std::vector<std::vector<std::uint8_t>> payloads(
      static_cast<std::size_t>(region.dims.d));
  for_each_slice(region.dims.d, [&](int z) {
    Slice s;
    s.w = region.dims.w;
    s.h = region.dims.h;
    s.dtype = region.dtype;
    const auto plane = region.slice(z);
    s.data.assign(plane.begin(), plane.end());
    payloads[z] = codec::encode_slice(registry, spec, s).bytes;
  });
  return payloads;
}

Archive base_archive(const Volume& volume, const codec::CodecSpec& spec,
                     Mode mode, DimMode dim) {
  Archive a;
  a.mode = mode;
  a.dim_mode = dim;
  a.dtype = volume.dtype;
  a.codec_id = spec.id;
  a.quality = static_cast<std::int16_t>(spec.quality);
  a.original_shape = volume.dims;
  return a;
}

std::array<float, 3> float_translation(const Mat4& affine) {
  const auto t = translation(affine);
  return {static_cast<float>(t[0]), static_cast<float>(t[1]),
          static_cast<float>(t[2])};
}

}  // namespace

Archive compress_full(const Volume& volume, const codec::CodecSpec& spec,
                      const CompressOptions& options,
                      const codec::CodecRegistry& registry) {
  volume.validate();
  check_mode_support(spec, options.dim_mode);
  Archive a = base_archive(volume, spec, Mode::Full, options.dim_mode);
  if (options.full_mode_affine || options.exact_affine) {
    a.metadata = metadata::make_metadata(RoiBox::full(volume.dims), volume);
    if (options.exact_affine) a.translation = float_translation(volume.affine);
  }
  a.payloads = encode_region(volume, spec, options.dim_mode, registry);
  return a;
}

Archive compress_roi(const Volume& volume, const codec::CodecSpec& spec,
                     const CompressOptions& options,
                     const codec::CodecRegistry& registry,
                     roi::RoiReport* report) {
  volume.validate();
  check_mode_support(spec, options.dim_mode);
  const roi::RoiReport extracted = roi::extract_roi(volume);
  if (report) *report = extracted;

  Archive a = base_archive(volume, spec, Mode::Roi, options.dim_mode);
  a.metadata = metadata::make_metadata(extracted.box, volume);
  if (options.exact_affine) a.translation = float_translation(volume.affine);
  const Volume cropped = roi::crop(volume, extracted.box);
  a.payloads = encode_region(cropped, spec, options.dim_mode, registry);
  return a;
}

Volume decompress(const Archive& archive, const codec::CodecRegistry& registry) {
  const codec::CodecSpec spec = registry.spec(archive.codec_id, archive.quality);
  check_mode_support(spec, archive.dim_mode);
  if (archive.payloads.size() != archive.expected_payloads()) {
    throw Error(ErrorCode::ShapeMismatch, "payload count does not match region");
  }

  Volume out = Volume::zeros(archive.original_shape, archive.dtype);
  if (archive.metadata) {
    out.affine = archive.translation
                     ? metadata::restore_affine(*archive.metadata, *archive.translation)
                     : metadata::restore_affine(*archive.metadata);
  }

  const RoiBox region = archive.encoded_region();
  const Dims rdims = region.extent();
  const auto row_bytes = static_cast<std::size_t>(rdims.w) * sizeof(float);
  auto place_plane = [&](const float* src, int z) {
    for (int y = 0; y < rdims.h; ++y) {
      std::memcpy(&out.data[out.index(region.x_min, region.y_min + y, region.z_min + z)],
                  src + static_cast<std::size_t>(y) * rdims.w, row_bytes);
    }
  };

  if (archive.dim_mode == DimMode::Volume3D) {
    codec::EncodedPayload p{archive.payloads.front(), rdims,
                            bits_per_sample(archive.dtype), archive.dtype};
    const Volume block = codec::decode_volume(registry, spec, p);
    for (int z = 0; z < rdims.d; ++z) {
      place_plane(block.slice(z).data(), z);
    }
    return out;
  }

  const Dims plane_dims{rdims.w, rdims.h, 1};
  for_each_slice(rdims.d, [&](int z) {
    codec::EncodedPayload p{archive.payloads[z], plane_dims,
                            bits_per_sample(archive.dtype), archive.dtype};
    const Slice s = codec::decode_slice(registry, spec, p);
    place_plane(s.data.data(), z);
  });
  return out;
}

}  // namespace medroi::pipeline
