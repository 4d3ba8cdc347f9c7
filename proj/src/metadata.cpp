#include "medroi/metadata.hpp"

#include <limits>
#include <string>

#include "medroi/byte_io.hpp"
#include "medroi/error.hpp"

namespace medroi::metadata {

namespace {

std::int16_t checked_i16(int v, const char* field) {
  if (v < std::numeric_limits<std::int16_t>::min() ||
      v > std::numeric_limits<std::int16_t>::max()) {
    throw Error(ErrorCode::FieldOverflow,
                std::string(field) + " = " + std::to_string(v) +
                    " does not fit int16");
  }
  return static_cast<std::int16_t>(v);
}

Mat3 widen(const std::array<std::array<float, 3>, 3>& r) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = r[i][j];
  return out;
}

}  // namespace

RoiMetadata make_metadata(const RoiBox& box, const Volume& volume) {
  RoiMetadata m;
  m.box = box;
  m.original_shape = volume.dims;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m.rot_scale[i][j] = static_cast<float>(volume.affine[i][j]);
  return m;
}

Record encode_metadata(const RoiMetadata& m) {
  ByteWriter w;
  w.i16(checked_i16(m.box.x_min, "x_min"));
  w.i16(checked_i16(m.box.x_max, "x_max"));
  w.i16(checked_i16(m.box.y_min, "y_min"));
  w.i16(checked_i16(m.box.y_max, "y_max"));
  w.i16(checked_i16(m.box.z_min, "z_min"));
  w.i16(checked_i16(m.box.z_max, "z_max"));
  w.i16(checked_i16(m.original_shape.w, "W"));
  w.i16(checked_i16(m.original_shape.h, "H"));
  w.i16(checked_i16(m.original_shape.d, "D"));
  for (const auto& row : m.rot_scale)
    for (float v : row) w.f32(v);

  Record out{};
  const auto& buf = w.buffer();
  std::copy(buf.begin(), buf.end(), out.begin());
  return out;
}

RoiMetadata decode_metadata(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kRecordSize) {
    throw Error(ErrorCode::WrongLength,
                "metadata record is " + std::to_string(bytes.size()) +
                    " bytes, expected 54");
  }
  ByteReader r(bytes);
  std::array<std::int16_t, 9> f{};
  for (auto& v : f) r.i16(v);
  RoiMetadata m;
  m.box = {f[0], f[1], f[2], f[3], f[4], f[5]};
  m.original_shape = {f[6], f[7], f[8]};
  for (auto& row : m.rot_scale)
    for (float& v : row) r.f32(v);
  if (!m.box.ordered()) {
    throw Error(ErrorCode::InvalidBox, "bounding box has min > max");
  }
  return m;
}

Mat4 restore_affine(const RoiMetadata& m) {
  const Mat3 r = widen(m.rot_scale);
  const std::array<double, 3> centre = {(m.original_shape.w - 1) / 2.0,
                                        (m.original_shape.h - 1) / 2.0,
                                        (m.original_shape.d - 1) / 2.0};
  std::array<double, 3> t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i] -= r[i][j] * centre[j];
  return compose_affine(r, t);
}

Mat4 restore_affine(const RoiMetadata& m, const std::array<float, 3>& t) {
  return compose_affine(widen(m.rot_scale), {t[0], t[1], t[2]});
}

}  // namespace medroi::metadata
