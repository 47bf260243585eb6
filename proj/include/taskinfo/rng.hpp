// Seeded random streams.  All distributions are generated from the raw
// mt19937_64 output through fully specified transforms (no library
// distribution objects), so a seed pins the exact draw sequence on every
// platform.
#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "taskinfo/special.hpp"

namespace taskinfo {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Well-separated substream seed for (seed, stream).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(seed ^ detail::splitmix64(stream));
  }

  std::uint64_t raw() { return engine_(); }

  /// Uniform in the open interval (0, 1), 53-bit resolution.
  double u01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by inverse-CDF; exact function of one u01 draw.
  double normal() { return kSqrt2 * erf_inv(2.0 * u01() - 1.0); }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(u01()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace taskinfo
