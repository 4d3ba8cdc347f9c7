#include "medroi/container.hpp"

#include <algorithm>
#include <limits>

#include "medroi/byte_io.hpp"
#include "medroi/error.hpp"

namespace medroi::container {

namespace {

void check_invariants(const Archive& a) {
  auto fail = [](ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
  };
  if (a.codec_id.empty() || a.codec_id.size() > 16 ||
      !std::all_of(a.codec_id.begin(), a.codec_id.end(),
                   [](unsigned char c) { return c > 0x20 && c < 0x7F; })) {
    fail(ErrorCode::InvalidArgument, "codec id must be 1-16 printable ASCII bytes");
  }
  for (int n : {a.original_shape.w, a.original_shape.h, a.original_shape.d}) {
    if (n < 1 || n > kMaxDim) fail(ErrorCode::ShapeMismatch, "shape outside [1, 32767]");
  }
  if (a.mode == Mode::Roi && !a.metadata) {
    fail(ErrorCode::InvalidArgument, "ROI archive without metadata record");
  }
  if (a.translation && !a.metadata) {
    fail(ErrorCode::InvalidArgument, "translation sidecar without metadata record");
  }
  if (a.metadata) {
    if (a.metadata->original_shape != a.original_shape) {
      fail(ErrorCode::ShapeMismatch, "metadata shape differs from archive shape");
    }
    if (!a.metadata->box.within(a.original_shape)) {
      fail(ErrorCode::InvalidBox, "metadata box outside the original shape");
    }
    if (a.mode == Mode::Full && a.metadata->box != RoiBox::full(a.original_shape)) {
      fail(ErrorCode::InvalidBox, "full-mode metadata must cover the whole volume");
    }
  }
  if (a.payloads.empty()) {
    fail(ErrorCode::InvalidArgument, "archive must hold at least one payload");
  }
  if (a.payloads.size() != a.expected_payloads()) {
    fail(ErrorCode::ShapeMismatch,
         "payload count " + std::to_string(a.payloads.size()) + " but region needs " +
             std::to_string(a.expected_payloads()));
  }
}

}  // namespace

RoiBox Archive::encoded_region() const {
  if (mode == Mode::Roi && metadata) return metadata->box;
  return RoiBox::full(original_shape);
}

std::size_t Archive::expected_payloads() const {
  if (dim_mode == DimMode::Volume3D) return 1;
  return static_cast<std::size_t>(encoded_region().extent().d);
}

std::size_t serialized_size(const Archive& a) {
  std::size_t n = kFixedHeaderSize + a.codec_id.size();
  if (a.metadata) n += metadata::kRecordSize;
  if (a.translation) n += metadata::kTranslationSize;
  for (const auto& p : a.payloads) n += kPayloadPrefixSize + p.size();
  return n;
}

std::vector<std::uint8_t> serialize(const Archive& a) {
  check_invariants(a);
  ByteWriter w;
  w.buffer().reserve(serialized_size(a));
  w.text(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(a.mode));
  w.u8(static_cast<std::uint8_t>(a.dim_mode));
  w.u8(static_cast<std::uint8_t>(a.dtype));
  w.u8(static_cast<std::uint8_t>(a.codec_id.size()));
  w.text(a.codec_id);
  w.i16(a.quality);
  w.u16(static_cast<std::uint16_t>(a.original_shape.w));
  w.u16(static_cast<std::uint16_t>(a.original_shape.h));
  w.u16(static_cast<std::uint16_t>(a.original_shape.d));
  std::uint8_t flags = 0;
  if (a.metadata) flags |= kHasMetadata;
  if (a.translation) flags |= kHasTranslation;
  w.u8(flags);
  if (a.metadata) w.bytes(metadata::encode_metadata(*a.metadata));
  if (a.translation) {
    for (float t : *a.translation) w.f32(t);
  }
  w.u32(static_cast<std::uint32_t>(a.payloads.size()));
  for (std::size_t i = 0; i < a.payloads.size(); ++i) {
    const auto& p = a.payloads[i];
    if (p.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::InvalidArgument, "payload exceeds 4 GiB", i);
    }
    w.u32(static_cast<std::uint32_t>(p.size()));
    w.bytes(p);
  }
  return w.take();
}

Archive deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::Truncated, std::string("archive ends inside ") + what);
  };

  std::span<const std::uint8_t> magic;
  need(r.bytes(4, magic), "magic");
  if (!std::equal(kMagic.begin(), kMagic.end(), magic.begin())) {
    throw Error(ErrorCode::BadMagic, "not an MROI archive");
  }
  std::uint8_t version = 0;
  need(r.u8(version), "version");
  if (version != kVersion) {
    throw Error(ErrorCode::UnsupportedVersion,
                "archive version " + std::to_string(version));
  }

  Archive a;
  std::uint8_t mode = 0, dim = 0, dtype = 0, id_len = 0;
  need(r.u8(mode), "header");
  need(r.u8(dim), "header");
  need(r.u8(dtype), "header");
  if (mode > 1 || dim > 1 || dtype > 3) {
    throw Error(ErrorCode::UnsupportedFormat, "invalid mode, dim_mode or dtype byte");
  }
  a.mode = static_cast<Mode>(mode);
  a.dim_mode = static_cast<DimMode>(dim);
  a.dtype = static_cast<Dtype>(dtype);

  need(r.u8(id_len), "header");
  std::span<const std::uint8_t> id;
  need(r.bytes(id_len, id), "codec id");
  a.codec_id.assign(id.begin(), id.end());

  std::uint16_t w = 0, h = 0, d = 0;
  need(r.i16(a.quality), "header");
  need(r.u16(w) && r.u16(h) && r.u16(d), "shape");
  a.original_shape = {w, h, d};

  std::uint8_t flags = 0;
  need(r.u8(flags), "header");
  if (flags & ~(kHasMetadata | kHasTranslation)) {
    throw Error(ErrorCode::UnsupportedFormat, "unknown flag bits");
  }
  if (flags & kHasMetadata) {
    std::span<const std::uint8_t> rec;
    need(r.bytes(metadata::kRecordSize, rec), "metadata record");
    a.metadata = metadata::decode_metadata(rec);
  }
  if (flags & kHasTranslation) {
    std::array<float, 3> t{};
    need(r.f32(t[0]) && r.f32(t[1]) && r.f32(t[2]), "translation sidecar");
    a.translation = t;
  }

  std::uint32_t count = 0;
  need(r.u32(count), "payload count");
  // Every payload costs at least its length prefix.
  a.payloads.reserve(std::min<std::size_t>(count, r.remaining() / kPayloadPrefixSize));
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t len = 0;
    std::span<const std::uint8_t> body;
    if (!r.u32(len) || !r.bytes(len, body)) {
      throw Error(ErrorCode::Truncated,
                  "archive ends inside payload " + std::to_string(i), i);
    }
    a.payloads.emplace_back(body.begin(), body.end());
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::UnsupportedFormat, "trailing bytes after payloads");
  }
  check_invariants(a);
  return a;
}

std::string_view mode_name(Mode mode) {
  return mode == Mode::Full ? "full" : "roi";
}

std::string_view dim_mode_name(DimMode dim) {
  return dim == DimMode::Slice2D ? "2d" : "3d";
}

}  // namespace medroi::container
