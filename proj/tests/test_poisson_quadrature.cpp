#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "losline/gauss_legendre.hpp"
#include "losline/poisson_tail.hpp"
#include "losline/rng.hpp"

using namespace losline;

TEST_CASE("poisson truncation") {
  SECTION("degenerate cases") {
    CHECK(poisson_truncation(0.0, 1e-8) == 0);
    CHECK(poisson_truncation(12.0, 1.0) == 0);
    CHECK(poisson_truncation(12.0, 2.0) == 0);
  }
  SECTION("mean 12, eps 1e-8: frozen from direct pmf summation") {
    const TruncatedPoisson tp = truncate_poisson(12.0, 1e-8);
    CHECK(tp.n_max == 36);
    CHECK(tp.tail < 1e-8);
    CHECK(tp.tail == Catch::Approx(5.520799421876282e-09).epsilon(1e-6));
    // minimality: one term less leaves too much mass
    double cum = 0.0;
    for (int k = 0; k < tp.n_max; ++k) cum += tp.pmf[std::size_t(k)];
    CHECK(1.0 - cum >= 1e-8);
    // pmf table is complete and consistent
    REQUIRE(int(tp.pmf.size()) == tp.n_max + 1);
    double total = 0.0;
    for (double f : tp.pmf) total += f;
    CHECK(total == Catch::Approx(1.0).margin(1e-8));
  }
  SECTION("smallest-N property at a second tolerance") {
    const TruncatedPoisson tp = truncate_poisson(12.0, 1e-6);
    CHECK(tp.n_max == 32);
    CHECK(tp.tail < 1e-6);
  }
  SECTION("pmf matches the recurrence") {
    double f = std::exp(-3.5);
    for (int k = 0; k <= 20; ++k) {
      CHECK(poisson_pmf(k, 3.5) == Catch::Approx(f).epsilon(1e-10));
      f *= 3.5 / double(k + 1);
    }
  }
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {4, 16, 64}) {
    const QuadRule rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.w) wsum += w;
    CHECK(wsum == Catch::Approx(2.0).epsilon(1e-13));
    // symmetry
    for (int i = 0; i < n / 2; ++i) {
      CHECK(rule.x[std::size_t(i)] ==
            Catch::Approx(-rule.x[std::size_t(n - 1 - i)]).margin(1e-14));
    }
    // exact for monomials of degree up to 2n-1
    for (int deg : {1, 3, 7, 2 * n - 1}) {
      const double got =
          integrate(rule, 0.0, 1.0, [&](double x) { return std::pow(x, deg); });
      CHECK(got == Catch::Approx(1.0 / (deg + 1)).epsilon(1e-12));
    }
    // smooth integrand converges fast; the 4-point rule is only ~1e-9 here
    const double e1 = integrate(rule, 0.0, 1.0, [](double x) { return std::exp(x); });
    CHECK(e1 == Catch::Approx(std::exp(1.0) - 1.0).epsilon(n >= 16 ? 1e-13 : 1e-7));
  }
}

TEST_CASE("ordered-simplex means against closed forms") {
  const QuadRule rule = gauss_legendre(64);
  SECTION("n = 2: E[exp(c (u2 - u1))] for sorted uniforms on [-1, 1]") {
    // closed form 2 (e^{cL} - 1 - cL) / (cL)^2 with L = 2, c = 0.7
    const double expected = 1.6889795580047700;
    const double got = ordered_mean_2(rule, -1.0, 1.0, [](const double* u) {
      return std::exp(0.7 * (u[1] - u[0]));
    });
    CHECK(got == Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("n = 3: symmetric integrand, E[exp(0.3 sum u)] = (sinh 0.3 / 0.3)^3") {
    const double expected = 1.0458874570995131;
    const double got = ordered_mean_3(rule, -1.0, 1.0, [](const double* u) {
      return std::exp(0.3 * (u[0] + u[1] + u[2]));
    });
    CHECK(got == Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("n = 1 is the plain average") {
    const double got =
        ordered_mean_1(rule, 2.0, 6.0, [](const double* u) { return u[0]; });
    CHECK(got == Catch::Approx(4.0).epsilon(1e-13));
  }
  SECTION("sorted-uniform sampling agrees within 3 sigma") {
    RandomStream rng(1234);
    const int m = 40000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < m; ++i) {
      double u[2] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      if (u[0] > u[1]) std::swap(u[0], u[1]);
      const double v = std::exp(0.7 * (u[1] - u[0]));
      s += v;
      s2 += v * v;
    }
    const double mean = s / m;
    const double se = std::sqrt((s2 - s * s / m) / (m - 1) / m);
    CHECK(std::abs(mean - 1.6889795580047700) < 3.0 * se);
  }
}
