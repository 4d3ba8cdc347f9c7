#include <doctest.h>

#include "medroi/error.hpp"
#include "medroi/phantom.hpp"
#include "medroi/roi.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace medroi;

TEST_CASE("phantom: zero outside a 16^3 box at fraction 0.5 on 32^3") {
  const Volume v = fixture::phantom(1, {32, 32, 32}, 0.5);
  const auto box = oracle::brute_bbox(v, 1e-30);
  REQUIRE(box);
  CHECK(box->extent().w <= 16);
  CHECK(box->extent().h <= 16);
  CHECK(box->extent().d <= 16);
  const RoiBox expected{8, 23, 8, 23, 8, 23};
  CHECK(oracle::nonzero_outside(v, expected) == 0);
  CHECK(phantom_axis_extent(32, 0.5).lo == 8);
  CHECK(phantom_axis_extent(32, 0.5).hi == 23);
}

TEST_CASE("phantom: deterministic per seed") {
  CHECK(fixture::phantom(4).data == fixture::phantom(4).data);
  CHECK(fixture::phantom(4).data != fixture::phantom(5).data);
  CHECK(fixture::phantom(4, {48, 48, 32}, 0.5, 10).data ==
        fixture::phantom(4, {48, 48, 32}, 0.5, 10).data);
}

TEST_CASE("phantom: fraction 1.0 yields a full-volume ROI") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Volume v = fixture::phantom(seed, {32, 32, 32}, 1.0);
    CHECK(roi::extract_roi(v).box == RoiBox::full(v.dims));
  }
}

TEST_CASE("phantom: samples are representable, noise bounded") {
  const Volume v = fixture::phantom(2, {32, 32, 24}, 0.5, 12.0);
  CHECK(v.dtype == Dtype::I16);
  CHECK(v.source_byte_len == nifti_plain_size(v.dims, Dtype::I16));
  const RoiBox tissue{8, 23, 8, 23, 6, 17};
  for (int z = 0; z < v.dims.d; ++z)
    for (int y = 0; y < v.dims.h; ++y)
      for (int x = 0; x < v.dims.w; ++x) {
        const float f = v.at(x, y, z);
        CHECK(f == std::round(f));
        if (!tissue.contains(x, y, z)) CHECK((f >= 0.0f && f <= 12.0f));
      }
}

TEST_CASE("phantom: invalid specs are rejected") {
  PhantomSpec s;
  s.tissue_fraction = 0.0;
  CHECK_THROWS_AS(generate_phantom(s), Error);
  s = {};
  s.noise_amplitude = -1;
  CHECK_THROWS_AS(generate_phantom(s), Error);
  s = {};
  s.dims = {4, 64, 64};
  CHECK_THROWS_AS(generate_phantom(s), Error);
}
