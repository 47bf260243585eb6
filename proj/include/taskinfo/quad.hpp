// Quadrature rules: Gauss-Hermite, Gauss-Legendre, adaptive Simpson,
// trapezoid sums over tabulated nodes.
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace taskinfo {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2) on (-inf, inf).
/// Nodes by Newton iteration on the normalized Hermite recurrence.
QuadRule gauss_hermite(int n);

/// Gauss-Legendre rule on [-1, 1].
QuadRule gauss_legendre(int n);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n);

/// Expectation of f under N(mean, sd^2) via n-point Gauss-Hermite.
double expect_normal(const std::function<double(double)>& f, double mean,
                     double sd, int n);

/// Adaptive Simpson integration to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 48);

/// Trapezoid sum over tabulated (nodes, values); nodes strictly increasing.
double trapezoid(std::span<const double> nodes, std::span<const double> values);

/// Golden-section maximizer of f on [a, b] to absolute tolerance tol.
double golden_section_max(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-10);

}  // namespace taskinfo
