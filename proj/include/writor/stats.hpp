#pragma once

#include <cstddef>
#include <span>

namespace writor {

struct TTestResult {
  double t = 0.0;
  std::size_t df = 0;
  double p = 1.0;  // two-sided

  bool operator==(const TTestResult&) const = default;
};

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// Student-t CDF with `df` degrees of freedom.
double student_t_cdf(double t, double df);

// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

// Paired test on d = a - b with the n-1 sample variance. All-zero
// differences give t = 0, p = 1. If the differences are constant but
// nonzero, t is +/-inf and p = 0. Throws PreconditionError when the lengths
// differ or n < 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace writor
