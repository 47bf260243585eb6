#include "taskinfo/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace taskinfo {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

namespace {

// Acklam's rational approximation to the standard normal quantile,
// relative error ~1.15e-9 before refinement.  Split so callers can feed
// the central offset q = p - 1/2 or the lower-tail mass directly and
// avoid forming p near 0 or 1.
double acklam_central(double q) {  // q = p - 1/2, |q| <= ~0.48
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double acklam_lower_tail(double p) {  // 0 < p < ~0.025, returns negative z
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  double q = std::sqrt(-2.0 * std::log(p));
  return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double quantile_guess(double p) {
  const double p_low = 0.02425;
  if (p < p_low) return acklam_lower_tail(p);
  if (p > 1.0 - p_low) return -acklam_lower_tail(1.0 - p);
  return acklam_central(p - 0.5);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  double x = quantile_guess(p);
  // Halley refinement.  The residual is formed from erfc so the tail
  // digits survive; two passes reach machine precision everywhere.
  for (int pass = 0; pass < 2; ++pass) {
    double e = normal_cdf(x) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double erf_inv(double x) {
  if (!(x > -1.0 && x < 1.0)) {
    if (x == 1.0 || x == -1.0) return x * std::numeric_limits<double>::infinity();
    throw std::domain_error("erf_inv: argument must lie in (-1, 1)");
  }
  if (x == 0.0) return 0.0;
  // erf_inv(x) = Phi^{-1}((x+1)/2) / sqrt(2).  The initial guess is formed
  // from x and 1-|x| directly (both exact) so no digits are lost near the
  // endpoints, then polished against erf/erfc.
  const double ax = std::abs(x);
  double z;
  if (ax <= 0.95) {
    z = acklam_central(0.5 * x) / kSqrt2;
  } else {
    double zt = acklam_lower_tail(0.5 * (1.0 - ax)) / kSqrt2;  // negative
    z = (x > 0.0) ? -zt : zt;
  }
  for (int pass = 0; pass < 2; ++pass) {
    // Residual erf(z) - x via erfc on the side that keeps digits.
    double e = (x > 0.5) ? ((1.0 - x) - std::erfc(z))
             : (x < -0.5) ? (std::erfc(-z) - (1.0 + x))
                          : (std::erf(z) - x);
    double u = e * 0.5 * kSqrtPi * std::exp(z * z);
    z -= u / (1.0 + z * u);
  }
  return z;
}

}  // namespace taskinfo
