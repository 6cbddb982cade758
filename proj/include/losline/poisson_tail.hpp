#pragma once

#include <cmath>
#include <vector>

#include "losline/errors.hpp"

namespace losline {

/// Poisson pmf via log-space evaluation; robust for any mean.
inline double poisson_pmf(int k, double mean) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mean) - mean - std::lgamma(double(k) + 1.0));
}

/// pmf table 0..n_max where n_max is the smallest N with
/// P(Poisson(mean) > N) < eps_tail, found by direct pmf summation.
struct TruncatedPoisson {
  double mean = 0.0;
  int n_max = 0;
  double tail = 0.0;          // 1 - sum(pmf), clamped at 0
  std::vector<double> pmf;    // indices 0..n_max
};

inline TruncatedPoisson truncate_poisson(double mean, double eps_tail) {
  if (!(mean >= 0.0)) throw ConfigError("", "Poisson mean must be >= 0");
  TruncatedPoisson tp;
  tp.mean = mean;
  // Hard stop far beyond any realistic truncation point; protects against
  // eps_tail below the resolution of the cumulative sum.
  const int k_cap = static_cast<int>(mean + 20.0 * std::sqrt(mean + 1.0)) + 200;
  double cum = 0.0;
  for (int k = 0; k <= k_cap; ++k) {
    const double f = poisson_pmf(k, mean);
    tp.pmf.push_back(f);
    cum += f;
    if (1.0 - cum < eps_tail) {
      tp.n_max = k;
      tp.tail = std::max(0.0, 1.0 - cum);
      return tp;
    }
  }
  tp.n_max = k_cap;
  tp.tail = std::max(0.0, 1.0 - cum);
  return tp;
}

/// Smallest N with P(Poisson(mean) > N) < eps_tail.
inline int poisson_truncation(double mean, double eps_tail) {
  return truncate_poisson(mean, eps_tail).n_max;
}

}  // namespace losline
