#include <doctest.h>

#include <random>

#include "medroi/error.hpp"
#include "medroi/roi.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace medroi;

TEST_CASE("roi: threshold is the mean of nonzero voxels") {
  Volume v = Volume::zeros({5, 1, 1}, Dtype::U8);
  v.data = {0, 0, 2, 4, 6};
  CHECK(roi::compute_threshold(v) == 4.0);
  Volume c = Volume::zeros({3, 3, 3}, Dtype::U8);
  std::fill(c.data.begin(), c.data.end(), 5.0f);
  CHECK(roi::compute_threshold(c) == 5.0);
  CHECK(roi::compute_bbox(c, 5.0) == RoiBox::full(c.dims));
  const Volume p = fixture::phantom(1, {32, 32, 32});
  CHECK(roi::compute_threshold(p) == doctest::Approx(oracle::nonzero_mean(p)).epsilon(1e-12));
}

TEST_CASE("roi: all-zero volume and empty tissue set") {
  const Volume z = Volume::zeros({4, 4, 4}, Dtype::U8);
  CHECK_THROWS_WITH_AS(roi::compute_threshold(z), doctest::Contains("AllZeroVolume"), Error);
  CHECK_THROWS_AS(roi::extract_roi(z), Error);
  Volume v = Volume::zeros({4, 4, 4}, Dtype::U8);
  v.data[3] = 1;
  CHECK_THROWS_AS(roi::compute_bbox(v, 2.0), Error);
  CHECK(roi::miss_rate(z, RoiBox{0, 0, 0, 0, 0, 0}) == 0.0);
}

TEST_CASE("roi: single voxel bbox and one-voxel crop") {
  Volume v = Volume::zeros({8, 8, 8}, Dtype::U8);
  v.at(3, 4, 5) = 9;
  const RoiBox b = roi::compute_bbox(v, roi::compute_threshold(v));
  CHECK(b == RoiBox{3, 3, 4, 4, 5, 5});
  const Volume c = roi::crop(v, b);
  CHECK(c.dims == Dims{1, 1, 1});
  CHECK(c.data[0] == 9.0f);
}

TEST_CASE("roi: bbox matches exhaustive scan on phantoms") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Volume v = fixture::phantom(seed, {40, 36, 28}, 0.6, seed % 2 ? 0.0 : 15.0);
    const double tau = roi::compute_threshold(v);
    CHECK(roi::compute_bbox(v, tau) == *oracle::brute_bbox(v, tau));
  }
}

TEST_CASE("roi: miss rate arithmetic") {
  Volume v = Volume::zeros({10, 10, 10}, Dtype::U8);
  for (int i = 0; i < 1000; ++i) v.data[i] = 1;
  const RoiBox box{0, 9, 0, 9, 0, 9};
  CHECK(roi::miss_rate(v, box) == 0.0);
  // 997 inside a smaller box, 3 left out.
  Volume w = Volume::zeros({20, 20, 20}, Dtype::U8);
  int placed = 0;
  for (int z = 0; z < 10 && placed < 997; ++z)
    for (int y = 0; y < 10 && placed < 997; ++y)
      for (int x = 0; x < 10 && placed < 997; ++x, ++placed) w.at(x, y, z) = 1;
  w.at(15, 15, 15) = 1;
  w.at(16, 15, 15) = 1;
  w.at(17, 15, 15) = 1;
  CHECK(roi::miss_rate(w, box) == doctest::Approx(0.003).epsilon(1e-15));
}

TEST_CASE("roi: miss rate matches an exhaustive count on a halo phantom") {
  const Volume v = fixture::phantom(7, {40, 40, 30});
  const auto r = roi::extract_roi(v);
  const double expected = static_cast<double>(oracle::nonzero_outside(v, r.tight_box)) /
                          static_cast<double>(oracle::nonzero_count(v));
  CHECK(r.pre_pad_miss_rate == expected);
}

TEST_CASE("roi: padding fires above 0.002 and grows every face by 3") {
  // A dim halo around a bright core: the halo sits below tau.
  Volume v = Volume::zeros({30, 30, 30}, Dtype::I16);
  for (int z = 10; z < 20; ++z)
    for (int y = 10; y < 20; ++y)
      for (int x = 10; x < 20; ++x) v.at(x, y, z) = 1000;
  for (int y = 12; y < 18; ++y) v.at(9, y, 15) = 10;  // 6 / 1006 > 0.002
  const auto r = roi::extract_roi(v);
  CHECK(r.tight_box == RoiBox{10, 19, 10, 19, 10, 19});
  CHECK(r.pre_pad_miss_rate > roi::kMissRateLimit);
  CHECK(r.padded);
  CHECK(r.box == RoiBox{7, 22, 7, 22, 7, 22});
  CHECK(r.post_pad_miss_rate == 0.0);

  Volume quiet = v;
  for (int y = 12; y < 18; ++y) quiet.at(9, y, 15) = 0;
  quiet.at(9, 12, 15) = 10;  // 1 / 1001 < 0.002
  const auto q = roi::extract_roi(quiet);
  CHECK_FALSE(q.padded);
  CHECK(q.box == q.tight_box);
}

TEST_CASE("roi: padding clamps at the volume edge") {
  Volume v = Volume::zeros({12, 12, 12}, Dtype::I16);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 7; x < 12; ++x) v.at(x, y, z) = 500;
  v.at(0, 11, 11) = 1;
  const auto r = roi::extract_roi(v);
  CHECK(r.padded);
  CHECK(r.box.within(v.dims));
  CHECK(r.box == RoiBox{4, 11, 0, 7, 0, 7});
  CHECK(roi::pad_box(RoiBox::full(v.dims), v.dims) == RoiBox::full(v.dims));
}

TEST_CASE("roi: noise-free constant core never pads") {
  Volume v = Volume::zeros({16, 16, 16}, Dtype::U8);
  for (int z = 4; z < 12; ++z)
    for (int y = 4; y < 12; ++y)
      for (int x = 4; x < 12; ++x) v.at(x, y, z) = 200;
  const auto r = roi::extract_roi(v);
  CHECK_FALSE(r.padded);
  CHECK(r.pre_pad_miss_rate == 0.0);
  CHECK(r.post_pad_miss_rate == 0.0);
}

TEST_CASE("roi: crop copies at offsets and shifts the affine") {
  std::mt19937 rng(9);
  Volume v = Volume::zeros({13, 11, 9}, Dtype::F32);
  std::uniform_real_distribution<float> u(-5.0f, 5.0f);
  for (float& f : v.data) f = u(rng);
  v.affine = compose_affine({{{2, 0, 0}, {0, 3, 0}, {0, 0, 4}}}, {1, 2, 3});
  for (int trial = 0; trial < 20; ++trial) {
    auto pick = [&](int n) {
      std::uniform_int_distribution<int> d(0, n - 1);
      int a = d(rng), b = d(rng);
      return std::pair{std::min(a, b), std::max(a, b)};
    };
    const auto [x0, x1] = pick(13);
    const auto [y0, y1] = pick(11);
    const auto [z0, z1] = pick(9);
    const RoiBox box{x0, x1, y0, y1, z0, z1};
    const Volume c = roi::crop(v, box);
    CHECK(c.dims == box.extent());
    for (int z = 0; z < c.dims.d; ++z)
      for (int y = 0; y < c.dims.h; ++y)
        for (int x = 0; x < c.dims.w; ++x) CHECK(c.at(x, y, z) == v.at(x + x0, y + y0, z + z0));
    const auto t = translation(c.affine);
    CHECK(t[0] == 1 + 2 * x0);
    CHECK(t[1] == 2 + 3 * y0);
    CHECK(t[2] == 3 + 4 * z0);
  }
  CHECK(roi::crop(v, RoiBox::full(v.dims)).data == v.data);
  CHECK_THROWS_AS(roi::crop(v, RoiBox{0, 13, 0, 0, 0, 0}), Error);
}
