#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "taskinfo/quad.hpp"
#include "taskinfo/special.hpp"

using namespace taskinfo;

TEST_CASE("erf_inv inverts erf to 1e-12 over the full range") {
  // Round-trip against the library erf, including deep tails.
  for (double x = -0.999; x < 0.9995; x += 0.001) {
    double z = erf_inv(x);
    CHECK(std::abs(std::erf(z) - x) < 1e-14);
  }
  for (double y : {1e-16, 1e-12, 1e-8, 1e-4, 1e-2}) {
    double x = 1.0 - y;
    double z = erf_inv(x);
    CHECK(std::abs(std::erfc(z) - y) < 1e-12 * y + 1e-18);
    CHECK(erf_inv(-x) == -z);
  }
  CHECK(erf_inv(0.0) == 0.0);
  // Known point: erf(1) = 0.8427007929497149.
  CHECK(std::abs(erf_inv(0.8427007929497149) - 1.0) < 1e-12);
  CHECK_THROWS_AS(erf_inv(1.5), std::domain_error);
}

TEST_CASE("normal quantile and cdf are mutually inverse") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-10}) {
    double z = normal_quantile(p);
    CHECK(std::abs(normal_cdf(z) - p) < 1e-13 * std::max(p, 1.0 - p) + 1e-16);
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
}

TEST_CASE("gauss-hermite integrates Gaussian moments exactly") {
  // Weight exp(-x^2): integral = sqrt(pi), second moment = sqrt(pi)/2.
  QuadRule rule = gauss_hermite(32);
  double mass = 0.0, second = 0.0, fourth = 0.0;
  for (int i = 0; i < 32; ++i) {
    mass += rule.weights[i];
    second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    fourth += rule.weights[i] * std::pow(rule.nodes[i], 4);
  }
  CHECK(mass == doctest::Approx(kSqrtPi).epsilon(1e-13));
  CHECK(second == doctest::Approx(0.5 * kSqrtPi).epsilon(1e-13));
  CHECK(fourth == doctest::Approx(0.75 * kSqrtPi).epsilon(1e-13));

  // Expectation over N(mu, sd^2).
  double m2 = expect_normal([](double x) { return x * x; }, 1.0, 2.0, 48);
  CHECK(m2 == doctest::Approx(1.0 + 4.0).epsilon(1e-12));
}

TEST_CASE("gauss-legendre is exact on polynomials of degree 2n-1") {
  double cubic = integrate_gl([](double x) { return x * x * x + x * x; }, 0.0, 1.0, 8);
  CHECK(cubic == doctest::Approx(0.25 + 1.0 / 3.0).epsilon(1e-14));
  double high = integrate_gl([](double x) { return std::pow(x, 15); }, -1.0, 2.0, 8);
  CHECK(high == doctest::Approx((std::pow(2.0, 16) - 1.0) / 16.0).epsilon(1e-13));
}

TEST_CASE("adaptive simpson reaches the requested tolerance") {
  double v = adaptive_simpson([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12);
  CHECK(v == doctest::Approx(kSqrtPi).epsilon(1e-11));
}

TEST_CASE("golden-section finds interior maxima") {
  double x = golden_section_max([](double t) { return -(t - 0.37) * (t - 0.37); }, -2.0,
                                3.0, 1e-12);
  CHECK(x == doctest::Approx(0.37).epsilon(1e-8));
}
