#include "core/mathutil.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace ogtt {

double mean(std::span<const double> x) {
  if (x.empty()) throw InputError("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw InputError("sample_variance: need at least 2 points");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double simpson_uniform(std::span<const double> y, double h) {
  const size_t n = y.size();
  if (n < 3 || n % 2 == 0)
    throw InputError("simpson_uniform: need an odd number of points >= 3");
  if (!(h > 0.0)) throw InputError("simpson_uniform: spacing must be positive");
  double odd = 0.0, even = 0.0;
  for (size_t i = 1; i + 1 < n; i += 2) odd += y[i];
  for (size_t i = 2; i + 1 < n; i += 2) even += y[i];
  return h / 3.0 * (y.front() + 4.0 * odd + 2.0 * even + y.back());
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw InputError("normal_quantile: p must be in (0,1)");
  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step against the exact CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double sample_quantile(std::span<const double> x, double q) {
  if (x.empty()) throw InputError("sample_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw InputError("sample_quantile: q must be in [0,1]");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

double anderson_darling_normal(std::span<const double> z) {
  const size_t n = z.size();
  if (n < 2) throw InputError("anderson_darling_normal: need at least 2");
  std::vector<double> s(z.begin(), z.end());
  std::sort(s.begin(), s.end());
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double lo = std::log(normal_cdf(s[i]));
    const double hi = std::log(normal_cdf(-s[n - 1 - i]));  // log(1-Phi)
    acc += (2.0 * static_cast<double>(i) + 1.0) * (lo + hi);
  }
  const double nn = static_cast<double>(n);
  return -nn - acc / nn;
}

}  // namespace ogtt
