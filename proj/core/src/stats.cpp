#include "mctail/stats.hpp"

#include <cmath>

#include "mctail/error.hpp"

namespace mctail {

namespace {

double rational(double r, const double* num, const double* den) {
  double p = num[7];
  double q = den[7];
  for (int i = 6; i >= 0; --i) {
    p = p * r + num[i];
    q = q * r + den[i];
  }
  return p / q;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::DomainError,
                "normal_quantile requires 0 < p < 1, got p=" + std::to_string(p));
  }

  // AS 241 algorithm PPND16 (Wichura 1988), accurate to ~1e-16.
  static const double a[8] = {
      3.3871328727963666080e+0, 1.3314166789178437745e+2,
      1.9715909503065514427e+3, 1.3731693765509461125e+4,
      4.5921953931549871457e+4, 6.7265770927008700853e+4,
      3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static const double b[8] = {
      1.0,                      4.2313330701600911252e+1,
      6.8718700749205790830e+2, 5.3941960214247511077e+3,
      2.1213794301586595867e+4, 3.9307895800092710610e+4,
      2.8729085735721942674e+4, 5.2264952788528545610e+3};
  static const double c[8] = {
      1.42343711074968357734e+0, 4.63033784615654529590e+0,
      5.76949722146069140550e+0, 3.64784832476320460504e+0,
      1.27045825245236838258e+0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static const double d[8] = {
      1.0,                       2.05319162663775882187e+0,
      1.67638483018380384940e+0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static const double e[8] = {
      6.65790464350110377720e+0, 5.46378491116411436990e+0,
      1.78482653991729133580e+0, 2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static const double f[8] = {
      1.0,                       5.99832206555887937690e-1,
      1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * rational(r, a, b);
  }

  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double result;
  if (r <= 5.0) {
    result = rational(r - 1.6, c, d);
  } else {
    result = rational(r - 5.0, e, f);
  }
  return (q < 0.0) ? -result : result;
}

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double nearest_rank_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw Error(ErrorCode::DomainError, "quantile of an empty series");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::DomainError,
                "quantile level must be in (0,1), got " + std::to_string(p));
  }
  const double h = p * static_cast<double>(sorted.size());
  // Fuzz keeps exact-rational levels (e.g. 0.05 * 100) from rounding up
  // one rank through floating-point noise.
  const double fuzz = 1e-9 * std::fmax(1.0, h);
  auto rank = static_cast<std::size_t>(std::ceil(h - fuzz));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

double sample_mean(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::DomainError, "mean of an empty series");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::DomainError, "variance needs at least 2 values");
  }
  const double m = sample_mean(values);
  double sum = 0.0;
  for (double v : values) {
    const double d = v - m;
    sum += d * d;
  }
  return sum / static_cast<double>(values.size() - 1);
}

double RunningMoments::variance() const noexcept {
  if (count_ < 2) return 0.0;
  return m2_ / static_cast<double>(count_ - 1);
}

double RunningMoments::stddev() const noexcept { return std::sqrt(variance()); }

}  // namespace mctail
