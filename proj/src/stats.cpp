#include "writor/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "writor/errors.hpp"

namespace writor {
namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw PreconditionError("incomplete_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw PreconditionError("degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

double student_t_cdf(double t, double df) {
  const double tail = student_t_two_sided_p(t, df) / 2.0;
  return t >= 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw PreconditionError("paired t-test needs equal-length samples (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  if (n < 2) throw PreconditionError("paired t-test needs at least two pairs");
  std::vector<double> d(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    sum += d[i];
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  bool all_zero = true;
  for (double v : d) {
    ss += (v - mean) * (v - mean);
    all_zero = all_zero && v == 0.0;
  }
  TTestResult r;
  r.df = n - 1;
  if (all_zero) {
    r.t = 0.0;
    r.p = 1.0;
    return r;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(r.df));
  return r;
}

}  // namespace writor
