// Scalar special functions used throughout the library.
#pragma once

namespace taskinfo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
// sqrt(2/pi), the normal-family ratio of total variation to root information.
inline constexpr double kSqrtTwoOverPi = 0.79788456080286535588;

/// Inverse of std::erf on (-1, 1).  Rational initial guess (Acklam's
/// normal-quantile coefficients) polished by Halley steps against
/// std::erfc; absolute error below 1e-14 over the full domain.
double erf_inv(double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal survival function 1 - Phi(z), accurate in the tail.
double normal_sf(double z);

/// Standard normal quantile, normal_cdf(normal_quantile(p)) == p.
double normal_quantile(double p);

/// Standard normal density.
double normal_pdf(double z);

}  // namespace taskinfo
