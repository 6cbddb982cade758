#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "losline/errors.hpp"

namespace losline {

/// Nodes and weights on [-1, 1].
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule, computed by Newton iteration on P_n with the
/// Chebyshev-angle initial guess. Exact for polynomials of degree 2n-1.
inline QuadRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("", "quadrature order must be >= 1");
  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int m = (n + 1) / 2;  // roots come in +/- pairs
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence up to P_n(z).
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.w[n - 1 - i] = rule.w[i];
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;  // central node is exactly zero
  return rule;
}

/// Integral of f over [a, b] with a precomputed rule.
template <class F>
double integrate(const QuadRule& rule, double a, double b, F&& f) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    s += rule.w[i] * f(c + h * rule.x[i]);
  return s * h;
}

// Mean of f over the ordered region a <= u_1 <= ... <= u_n <= b under the
// law of sorted i.i.d. uniforms, i.e. (n! / (b-a)^n) * integral over the
// simplex. Nested rules, one dimension per loop.

template <class F>
double ordered_mean_1(const QuadRule& rule, double a, double b, F&& f) {
  return integrate(rule, a, b, [&](double u1) { return f(&u1); }) / (b - a);
}

template <class F>
double ordered_mean_2(const QuadRule& rule, double a, double b, F&& f) {
  const double len = b - a;
  double outer = integrate(rule, a, b, [&](double u1) {
    return integrate(rule, u1, b, [&](double u2) {
      const double u[2] = {u1, u2};
      return f(u);
    });
  });
  return 2.0 * outer / (len * len);
}

template <class F>
double ordered_mean_3(const QuadRule& rule, double a, double b, F&& f) {
  const double len = b - a;
  double outer = integrate(rule, a, b, [&](double u1) {
    return integrate(rule, u1, b, [&](double u2) {
      return integrate(rule, u2, b, [&](double u3) {
        const double u[3] = {u1, u2, u3};
        return f(u);
      });
    });
  });
  return 6.0 * outer / (len * len * len);
}

}  // namespace losline
