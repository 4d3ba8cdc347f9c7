#include <doctest.h>

#include <cmath>

#include "medroi/error.hpp"
#include "medroi/stats.hpp"

using namespace medroi;
using namespace medroi::stats;

// Reference values from scipy.stats (ttest_rel, t.sf) and
// statsmodels.stats.multitest.multipletests(method="holm").

TEST_CASE("stats: paired t-test reference case") {
  const std::vector<double> a{2.1, 1.9, 2.3, 2.5, 1.8}, b{1.5, 1.4, 1.9, 2.0, 1.3};
  const auto r = paired_t_test(a, b);
  CHECK(r.df == 4);
  CHECK(std::fabs(r.t - 15.811388300841884) < 1e-8);
  CHECK(std::fabs(r.p - 9.349274639994492e-05) < 1e-8);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("stats: Student-t two-sided tail table") {
  struct Row {
    double df, t, p;
  };
  const Row rows[] = {{1, 0, 1.0},
                      {1, 1, 0.49999999999999956},
                      {1, 2, 0.2951672353008664},
                      {1, 3, 0.20483276469913345},
                      {5, 1, 0.36321746764912255},
                      {5, 2, 0.10193947882985828},
                      {5, 3, 0.03009924789746257},
                      {30, 1, 0.32530861542602985},
                      {30, 2, 0.0546250449629831},
                      {30, 3, 0.005389964065651944}};
  for (const auto& row : rows) {
    CAPTURE(row.df);
    CAPTURE(row.t);
    CHECK(std::fabs(student_t_two_sided_p(row.t, row.df) - row.p) < 1e-10);
    CHECK(std::fabs(student_t_two_sided_p(-row.t, row.df) - row.p) < 1e-10);
  }
}

TEST_CASE("stats: degenerate differences") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const auto same = paired_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  CHECK_FALSE(same.degenerate);
  const std::vector<double> b{0, 1, 2, 3, 4};
  const auto shifted = paired_t_test(a, b);
  CHECK(shifted.degenerate);
  CHECK(shifted.p == 0.0);
  CHECK(std::isinf(shifted.t));
}

TEST_CASE("stats: paired t-test argument errors") {
  const std::vector<double> a{1, 2, 3}, b{1, 2};
  CHECK_THROWS_WITH_AS(paired_t_test(a, b), doctest::Contains("LengthMismatch"), Error);
  CHECK_THROWS_AS(paired_t_test(std::span(a).first(1), std::span(a).first(1)), Error);
}

TEST_CASE("stats: incomplete beta edge values") {
  CHECK(regularized_incomplete_beta(0.0, 2, 3) == 0.0);
  CHECK(regularized_incomplete_beta(1.0, 2, 3) == 1.0);
  // I_x(1, 1) = x and I_x(a, b) = 1 - I_{1-x}(b, a).
  CHECK(regularized_incomplete_beta(0.3, 1, 1) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(regularized_incomplete_beta(0.3, 2.5, 4) ==
        doctest::Approx(1 - regularized_incomplete_beta(0.7, 4, 2.5)).epsilon(1e-13));
}

TEST_CASE("stats: Holm step-down") {
  const std::vector<double> p{0.01, 0.04, 0.03};
  const auto h = holm_correction(p);
  const std::vector<double> expect{0.03, 0.06, 0.06};
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(h[i] - expect[i]) < 1e-12);

  const std::vector<double> p5{0.2, 0.001, 0.5, 0.01, 0.03};
  const std::vector<double> e5{0.4, 0.005, 0.5, 0.04, 0.09};
  const auto h5 = holm_correction(p5);
  for (int i = 0; i < 5; ++i) CHECK(std::fabs(h5[i] - e5[i]) < 1e-12);

  CHECK(holm_correction(std::vector<double>{0.02}) == std::vector<double>{0.02});
  CHECK(holm_correction(std::vector<double>{1, 1, 1}) == std::vector<double>{1, 1, 1});
  CHECK(holm_correction(std::vector<double>{}).empty());
  CHECK_THROWS_AS(holm_correction(std::vector<double>{0.5, 1.5}), Error);
  CHECK(bonferroni_correction(std::vector<double>{0.01, 0.4}) == std::vector<double>{0.02, 0.8});
}
