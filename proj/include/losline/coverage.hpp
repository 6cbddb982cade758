#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "losline/analytic_los.hpp"
#include "losline/estimate.hpp"
#include "losline/gauss_legendre.hpp"
#include "losline/parallel.hpp"
#include "losline/params.hpp"
#include "losline/poisson_tail.hpp"
#include "losline/rng.hpp"
#include "losline/simulator.hpp"

namespace losline {

enum class CoverageKind { full, at_least_k };
enum class CoverageMethod { conditional_mc, quadrature, simulate };

struct CoverageBudget {
  std::int64_t mc_trials = 100000;        // conditional-mc trials
  int quad_nodes = 64;                    // Gauss-Legendre nodes per dim, n <= 3
  std::int64_t simplex_samples_per_n = 20000;  // sorted-uniform samples, n > 3
};

struct CoverageQuery {
  ScenarioParams params;
  CoverageKind kind = CoverageKind::full;
  int k = 1;  // at-least-k only
  CoverageMethod method = CoverageMethod::conditional_mc;
  CoverageBudget budget;
  double eps_tail = 1e-8;
  bool include_empty = false;  // does n = 0 count as covered (full kind only)
  int analytic_n_cap = 0;      // 0 = default: 10 for k=1, 8 for k>=2
  int workers = 1;
  std::uint64_t seed = 1;

  void validate() const {
    params.validate();
    if (k < 1) throw ConfigError("k", "k must be >= 1");
    if (!(eps_tail > 0.0 && eps_tail < 1.0))
      throw ConfigError("eps_tail", "eps_tail must lie in (0, 1)");
    if (budget.mc_trials < 1 || budget.quad_nodes < 1 ||
        budget.simplex_samples_per_n < 2)
      throw ConfigError("trials", "integration budget must be positive");
    if (workers < 1) throw ConfigError("workers", "workers must be >= 1");
  }

  int resolved_n_cap() const {
    if (analytic_n_cap > 0) return analytic_n_cap;
    return k <= 1 ? 10 : 8;
  }
};

struct CoverageResult {
  ProbEstimate estimate;
  int n_max = 0;               // truncation depth (quadrature) or max n seen (mc)
  std::vector<double> per_n;   // per-n term contributions; sums to the value
  double wall_seconds = 0.0;
  std::string warning;         // set for degenerate detectability
};

// --- inclusion-exclusion over joint-LOS events -------------------------------
//
// For sorted projections and any index subset T, P(all of T LOS) factorizes
// over the consecutive gaps of T (subset-size exponent prefix):
//   P(L_T) = p^|T| * prod_m exp((2/mu + gap_m) lambda_b e^{-mu gap_m}),
//   p = e^{-2 lambda_b / mu}.
// This lets the size-j subset sums S_j = sum_{|T|=j} P(L_T) be accumulated by
// a dynamic program over (largest element, size) in O(n^3) instead of
// enumerating all 2^n subsets. Then
//   P(at least k LOS) = sum_{j=k}^{n} (-1)^{j-k} C(j-1, k-1) S_j,
// whose partial sums alternate as upper/lower (Bonferroni-type) bounds.

/// S[j] (1-based) for j = 1..max_j.
inline std::vector<double> subset_joint_los_sums(double lambda_b, double mu,
                                                 std::span<const double> xhat,
                                                 int max_j) {
  const int n = static_cast<int>(xhat.size());
  max_j = std::min(max_j, n);
  const double p_single = los_prob_single(lambda_b, mu);
  // w[i][i'] = conditional gap factor between elements i' < i.
  std::vector<std::vector<double>> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[i].resize(static_cast<std::size_t>(i));
    for (int j = 0; j < i; ++j)
      w[i][j] = std::exp(joint_gap_log_factor(lambda_b, mu, xhat[i] - xhat[j]));
  }
  std::vector<double> sums(static_cast<std::size_t>(max_j) + 1, 0.0);
  std::vector<double> g_prev(static_cast<std::size_t>(n), p_single);  // size 1
  for (int i = 0; i < n; ++i) sums[1] += g_prev[i];
  std::vector<double> g_cur(static_cast<std::size_t>(n));
  for (int c = 2; c <= max_j; ++c) {
    for (int i = 0; i < n; ++i) {
      // w already carries one factor of p_single per added element
      double s = 0.0;
      for (int j = c - 2; j < i; ++j) s += w[i][j] * g_prev[j];
      g_cur[i] = s;
      sums[c] += g_cur[i];
    }
    std::swap(g_prev, g_cur);
  }
  return sums;
}

/// P(at least k of the transmitters are LOS) given sorted projections.
/// Throws BudgetExceeded when n exceeds the analytic cap. When
/// `bonferroni_partials` is given, the alternating partial sums (one per
/// inclusion-exclusion depth j = k..n) are appended for diagnostics.
inline double at_least_k_los_given_projections(
    double lambda_b, double mu, std::span<const double> xhat, int k, int n_cap,
    std::vector<double>* bonferroni_partials = nullptr) {
  const int n = static_cast<int>(xhat.size());
  if (k < 1) throw ConfigError("k", "k must be >= 1");
  if (n < k) return 0.0;
  if (n > n_cap)
    throw BudgetExceeded(
        "inclusion-exclusion over n = " + std::to_string(n) +
        " transmitters exceeds the analytic cap (" + std::to_string(n_cap) +
        "); use method=simulate or raise the cap");
  const std::vector<double> sums = subset_joint_los_sums(lambda_b, mu, xhat, n);
  double value = 0.0;
  double sign = 1.0;
  double binom = 1.0;  // C(j-1, k-1), starting at j = k
  for (int j = k; j <= n; ++j) {
    value += sign * binom * sums[static_cast<std::size_t>(j)];
    if (bonferroni_partials) bonferroni_partials->push_back(value);
    sign = -sign;
    binom = binom * double(j) / double(j - k + 1);
  }
  // Alternating-sum rounding can leave the value a hair outside [0,1].
  if (value < -1e-6 || value > 1.0 + 1e-6)
    throw ConfigError("", "inclusion-exclusion lost numerical precision (value " +
                              std::to_string(value) + ")");
  return std::clamp(value, 0.0, 1.0);
}

// --- coverage evaluators ------------------------------------------------------

namespace detail {

struct CoverageGeometry {
  double xi = 0.0;        // detectable transmitter segment length
  double xi_hat = 0.0;    // projected segment length on the obstacle line
  double mean = 0.0;      // lambda_t * xi
  double proj_ratio = 0.0;
};

inline CoverageGeometry coverage_geometry(const ScenarioParams& p) {
  CoverageGeometry g;
  const double d_star = detect_radius(p.radio);
  g.xi = window_length(d_star, p.d1, p.d2);  // throws if degenerate
  g.proj_ratio = p.d1 / p.total_height();
  g.xi_hat = g.xi * g.proj_ratio;
  g.mean = p.lambda_t * g.xi;
  return g;
}

/// Coverage value conditional on sorted projections.
inline double conditional_coverage_value(const CoverageQuery& q,
                                         double lambda_b, double mu,
                                         std::span<const double> xhat) {
  if (q.kind == CoverageKind::full) {
    if (xhat.empty()) return q.include_empty ? 1.0 : 0.0;
    return los_prob_joint_projected(lambda_b, mu, xhat);
  }
  return at_least_k_los_given_projections(lambda_b, mu, xhat, q.k,
                                          q.resolved_n_cap());
}

inline CoverageResult degenerate_result(const CoverageQuery& q) {
  CoverageResult res;
  res.estimate.value =
      (q.kind == CoverageKind::full && q.include_empty) ? 1.0 : 0.0;
  res.estimate.method = Method::closed_form;
  res.warning =
      "no detectable region (d_star <= d1 + d2); returning the n = 0 value";
  return res;
}

inline CoverageResult conditional_mc_coverage(const CoverageQuery& q,
                                              const CoverageGeometry& g) {
  const Lane& lane = q.params.single_lane();
  struct Part {
    double sum = 0.0, sumsq = 0.0;
    std::int64_t n = 0;
    std::vector<double> per_n_sum;
    int n_seen = 0;
  };
  auto parts = run_partitioned(
      q.budget.mc_trials, q.workers,
      [&](std::int64_t t0, std::int64_t t1) {
        Part part;
        for (std::int64_t t = t0; t < t1; ++t) {
          RandomStream rng = RandomStream::substream(q.seed, std::uint64_t(t));
          std::vector<double> xhat =
              rng.poisson_process(q.params.lambda_t, -g.xi / 2.0, g.xi / 2.0);
          for (double& x : xhat) x *= g.proj_ratio;  // order-preserving
          const double v = conditional_coverage_value(q, lane.lambda_b, lane.mu, xhat);
          part.sum += v;
          part.sumsq += v * v;
          ++part.n;
          const int n_tx = static_cast<int>(xhat.size());
          if (n_tx >= static_cast<int>(part.per_n_sum.size()))
            part.per_n_sum.resize(static_cast<std::size_t>(n_tx) + 1, 0.0);
          part.per_n_sum[static_cast<std::size_t>(n_tx)] += v;
          part.n_seen = std::max(part.n_seen, n_tx);
        }
        return part;
      });

  double sum = 0.0, sumsq = 0.0;
  std::int64_t n = 0;
  CoverageResult res;
  for (const Part& p : parts) {
    sum += p.sum;
    sumsq += p.sumsq;
    n += p.n;
    if (p.per_n_sum.size() > res.per_n.size()) res.per_n.resize(p.per_n_sum.size(), 0.0);
    for (std::size_t i = 0; i < p.per_n_sum.size(); ++i) res.per_n[i] += p.per_n_sum[i];
    res.n_max = std::max(res.n_max, p.n_seen);
  }
  for (double& c : res.per_n) c /= double(n);
  res.estimate.value = sum / double(n);
  const double var = n > 1 ? std::max(0.0, (sumsq - sum * sum / double(n)) / double(n - 1))
                           : 0.0;
  res.estimate.stderr_ = std::sqrt(var / double(n));
  res.estimate.n_samples = n;
  res.estimate.method = Method::mc;
  return res;
}

inline CoverageResult quadrature_coverage(const CoverageQuery& q,
                                          const CoverageGeometry& g) {
  const Lane& lane = q.params.single_lane();
  const TruncatedPoisson tp = truncate_poisson(g.mean, q.eps_tail);
  constexpr int kMaxTerms = 512;
  if (tp.n_max > kMaxTerms)
    throw BudgetExceeded("Poisson truncation needs " + std::to_string(tp.n_max) +
                         " terms; use method=simulate");
  if (q.kind == CoverageKind::at_least_k && tp.n_max > q.resolved_n_cap())
    throw BudgetExceeded(
        "at-least-k truncation depth " + std::to_string(tp.n_max) +
        " exceeds the analytic cap (" + std::to_string(q.resolved_n_cap()) +
        "); use method=simulate or raise the cap");

  const double a = g.xi_hat / 2.0;
  const QuadRule rule = gauss_legendre(q.budget.quad_nodes);
  CoverageResult res;
  res.n_max = tp.n_max;
  res.per_n.assign(static_cast<std::size_t>(tp.n_max) + 1, 0.0);

  auto f = [&](const double* u, int n) {
    return conditional_coverage_value(
        q, lane.lambda_b, lane.mu,
        std::span<const double>(u, static_cast<std::size_t>(n)));
  };

  double value = 0.0, var = 0.0;
  if (q.kind == CoverageKind::full && q.include_empty) {
    res.per_n[0] = tp.pmf[0];
    value += tp.pmf[0];
  }
  const int n_lo = q.kind == CoverageKind::at_least_k ? q.k : 1;
  for (int n_tx = n_lo; n_tx <= tp.n_max; ++n_tx) {
    const double pn = tp.pmf[static_cast<std::size_t>(n_tx)];
    double expectation, se = 0.0;
    if (n_tx == 1) {
      expectation = ordered_mean_1(rule, -a, a, [&](const double* u) { return f(u, 1); });
    } else if (n_tx == 2) {
      expectation = ordered_mean_2(rule, -a, a, [&](const double* u) { return f(u, 2); });
    } else if (n_tx == 3) {
      expectation = ordered_mean_3(rule, -a, a, [&](const double* u) { return f(u, 3); });
    } else {
      // Sorted-uniform Monte Carlo on the ordered simplex, one stream per n.
      RandomStream rng = RandomStream::substream(q.seed, 0xA000 + std::uint64_t(n_tx));
      const std::int64_t m = q.budget.simplex_samples_per_n;
      std::vector<double> u(static_cast<std::size_t>(n_tx));
      double s = 0.0, s2 = 0.0;
      for (std::int64_t i = 0; i < m; ++i) {
        for (double& x : u) x = rng.uniform(-a, a);
        std::sort(u.begin(), u.end());
        const double v = f(u.data(), n_tx);
        s += v;
        s2 += v * v;
      }
      expectation = s / double(m);
      const double sample_var = std::max(0.0, (s2 - s * s / double(m)) / double(m - 1));
      se = std::sqrt(sample_var / double(m));
    }
    res.per_n[static_cast<std::size_t>(n_tx)] = pn * expectation;
    value += pn * expectation;
    var += (pn * se) * (pn * se);
  }
  res.estimate.value = std::clamp(value, 0.0, 1.0);
  res.estimate.method = Method::quadrature;
  if (var > 0.0) res.estimate.stderr_ = std::sqrt(var);
  res.estimate.truncation = TruncationDiag{tp.n_max, tp.tail};
  return res;
}

inline CoverageResult simulate_coverage(const CoverageQuery& q) {
  SimConfig cfg;
  cfg.params = q.params;
  cfg.n_trials = q.budget.mc_trials;
  cfg.seed = q.seed;
  cfg.workers = q.workers;
  const SimEstimate sim = sim_coverage(
      cfg,
      q.kind == CoverageKind::full ? SimCoverageKind::full
                                   : SimCoverageKind::at_least_k,
      q.k, q.include_empty);
  CoverageResult res;
  res.estimate.value = sim.value;
  res.estimate.stderr_ = sim.stderr_;
  res.estimate.n_samples = sim.n_trials;
  res.estimate.method = Method::mc;
  return res;
}

inline CoverageResult evaluate_coverage(const CoverageQuery& q) {
  q.validate();
  const auto start = std::chrono::steady_clock::now();
  CoverageResult res;
  try {
    const CoverageGeometry g = coverage_geometry(q.params);
    switch (q.method) {
      case CoverageMethod::conditional_mc:
        res = conditional_mc_coverage(q, g);
        break;
      case CoverageMethod::quadrature:
        res = quadrature_coverage(q, g);
        break;
      case CoverageMethod::simulate:
        res = simulate_coverage(q);
        break;
    }
  } catch (const NoDetectableRegion&) {
    res = degenerate_result(q);
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  res.estimate.check();
  return res;
}

}  // namespace detail

/// P(typical receiver is LOS w.r.t. every detectable transmitter):
/// sum over n of P(N = n) * E[joint LOS of n ordered uniform projections].
inline CoverageResult full_coverage_prob(CoverageQuery query) {
  query.kind = CoverageKind::full;
  return detail::evaluate_coverage(query);
}

/// P(typical receiver is LOS w.r.t. at least k detectable transmitters),
/// by inclusion-exclusion over joint-LOS events of transmitter subsets.
inline CoverageResult k_los_prob(CoverageQuery query) {
  query.kind = CoverageKind::at_least_k;
  return detail::evaluate_coverage(query);
}

}  // namespace losline
