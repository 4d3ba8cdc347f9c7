#pragma once

#include <span>
#include <vector>

namespace medroi::stats {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  // Differences were constant and nonzero: t is infinite, p is 0.
  bool degenerate = false;
};

// Paired Student t-test on a[i] - b[i], two-sided. Throws LengthMismatch
// for unequal lengths and InvalidArgument for fewer than two pairs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// Step-down adjusted p-values in input order, clipped to 1.
std::vector<double> holm_correction(std::span<const double> p);
std::vector<double> bonferroni_correction(std::span<const double> p);

}  // namespace medroi::stats
