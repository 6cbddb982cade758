#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "losline/analytic_los.hpp"
#include "losline/errors.hpp"
#include "losline/geometry.hpp"
#include "losline/parallel.hpp"
#include "losline/params.hpp"
#include "losline/rng.hpp"
#include "losline/sampling.hpp"

namespace losline {

enum class SimMode { snapshot, ergodic };

struct SimConfig {
  ScenarioParams params;
  std::int64_t n_trials = 100000;
  std::uint64_t seed = 1;
  double window_half = 0.0;  // obstacle window half-length; 0 = auto
  int workers = 1;
  SimMode mode = SimMode::snapshot;
  // ergodic mode only:
  double horizon_s = 0.0;  // 0 = auto (relative sweep of 1e4 / mu_min)
  double dt_s = 0.0;       // 0 = auto
  // volume-fraction probe interval length; 0 = auto (2000 / mu_min)
  double probe_length = 0.0;

  void validate() const {
    params.validate();
    if (n_trials < 1) throw ConfigError("trials", "n_trials must be >= 1");
    if (workers < 1) throw ConfigError("workers", "workers must be >= 1");
  }
};

struct SimEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::int64_t n_trials = 0;
  std::uint64_t seed = 0;
  SimMode mode = SimMode::snapshot;
  // Normal-approximation stderr is unreliable when either outcome count is
  // small; flagged rather than switching interval types.
  bool low_counts = false;
};

struct TrialRecord {
  std::int64_t trial = 0;
  int n_tx = 0;
  int n_los = 0;
  bool covered = false;
};

namespace detail {

struct BernoulliSums {
  std::int64_t successes = 0;
  std::int64_t n = 0;
};

inline SimEstimate bernoulli_estimate(const std::vector<BernoulliSums>& parts,
                                      const SimConfig& cfg) {
  std::int64_t s = 0, n = 0;
  for (const auto& p : parts) {
    s += p.successes;
    n += p.n;
  }
  SimEstimate est;
  est.value = n > 0 ? double(s) / double(n) : 0.0;
  est.stderr_ = n > 0 ? std::sqrt(est.value * (1.0 - est.value) / double(n)) : 0.0;
  est.n_trials = n;
  est.seed = cfg.seed;
  est.mode = cfg.mode;
  est.low_counts = std::min(s, n - s) < 30;
  return est;
}

inline double mu_min(const ScenarioParams& p) {
  double m = p.lanes.front().mu;
  for (const Lane& ln : p.lanes) m = std::min(m, ln.mu);
  return m;
}

}  // namespace detail

/// Fraction of trials in which the receiver at the origin has an unobstructed
/// path to a transmitter at (tx_x, d1+d2); multi-lane aware.
inline SimEstimate sim_los_single(const SimConfig& cfg, double tx_x) {
  cfg.validate();
  const double H = cfg.params.total_height();
  bool first = true;
  double lo = 0.0, hi = 0.0;
  for (const Lane& ln : cfg.params.lanes) {
    const double xh = project_to_height(tx_x, 0.0, ln.height, H);
    lo = first ? xh : std::min(lo, xh);
    hi = first ? xh : std::max(hi, xh);
    first = false;
  }
  auto parts = run_partitioned(
      cfg.n_trials, cfg.workers,
      [&](std::int64_t t0, std::int64_t t1) {
        detail::BernoulliSums acc;
        for (std::int64_t t = t0; t < t1; ++t) {
          RandomStream rng = RandomStream::substream(cfg.seed, std::uint64_t(t));
          const ObstacleSet obs = sample_obstacles(cfg.params, lo, hi, rng);
          if (!is_blocked(obs, tx_x, 0.0, H)) ++acc.successes;
          ++acc.n;
        }
        return acc;
      });
  return detail::bernoulli_estimate(parts, cfg);
}

/// Fraction of trials in which every transmitter in `txs` is LOS.
inline SimEstimate sim_joint_los(const SimConfig& cfg, const TransmitterSet& txs) {
  cfg.validate();
  if (txs.size() == 0) throw ConfigError("tx", "need at least one transmitter");
  const double H = cfg.params.total_height();
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const Lane& ln : cfg.params.lanes) {
    for (double x : txs.xs) {
      const double xh = project_to_height(x, 0.0, ln.height, H);
      lo = first ? xh : std::min(lo, xh);
      hi = first ? xh : std::max(hi, xh);
      first = false;
    }
  }
  auto parts = run_partitioned(
      cfg.n_trials, cfg.workers,
      [&](std::int64_t t0, std::int64_t t1) {
        detail::BernoulliSums acc;
        for (std::int64_t t = t0; t < t1; ++t) {
          RandomStream rng = RandomStream::substream(cfg.seed, std::uint64_t(t));
          const ObstacleSet obs = sample_obstacles(cfg.params, lo, hi, rng);
          bool all_los = true;
          for (double x : txs.xs) {
            if (is_blocked(obs, x, 0.0, H)) {
              all_los = false;
              break;
            }
          }
          if (all_los) ++acc.successes;
          ++acc.n;
        }
        return acc;
      });
  return detail::bernoulli_estimate(parts, cfg);
}

enum class SimCoverageKind { full, at_least_k };

/// Ensemble estimate of the LOS coverage probability: each trial resamples
/// both the transmitter PPP on the detectable segment and the obstacle model,
/// then evaluates the coverage event by exact geometry.
inline SimEstimate sim_coverage(const SimConfig& cfg, SimCoverageKind kind,
                                int k = 1, bool include_empty = false,
                                std::vector<TrialRecord>* dump = nullptr) {
  cfg.validate();
  if (kind == SimCoverageKind::at_least_k && k < 1)
    throw ConfigError("k", "k must be >= 1");
  const double H = cfg.params.total_height();
  const double d_star = detect_radius(cfg.params.radio);
  const double xi = window_length(d_star, cfg.params.d1, cfg.params.d2);
  double L = cfg.window_half > 0.0 ? cfg.window_half : xi / 2.0;
  if (L < xi / 2.0)
    throw ConfigError("window_half",
                      "obstacle window must cover the detectable segment");

  struct Part {
    detail::BernoulliSums acc;
    std::vector<TrialRecord> rows;
  };
  auto parts = run_partitioned(
      cfg.n_trials, cfg.workers,
      [&](std::int64_t t0, std::int64_t t1) {
        Part part;
        for (std::int64_t t = t0; t < t1; ++t) {
          RandomStream rng = RandomStream::substream(cfg.seed, std::uint64_t(t));
          const std::vector<double> txs =
              sample_transmitters(cfg.params.lambda_t, -xi / 2.0, xi / 2.0, rng);
          const ObstacleSet obs = sample_obstacles(cfg.params, -L, L, rng);
          int n_los = 0;
          for (double x : txs)
            if (!is_blocked(obs, x, 0.0, H)) ++n_los;
          bool covered;
          if (kind == SimCoverageKind::full)
            covered = txs.empty() ? include_empty
                                  : n_los == static_cast<int>(txs.size());
          else
            covered = n_los >= k;
          if (covered) ++part.acc.successes;
          ++part.acc.n;
          if (dump)
            part.rows.push_back(TrialRecord{t, static_cast<int>(txs.size()),
                                            n_los, covered});
        }
        return part;
      });
  std::vector<detail::BernoulliSums> sums;
  for (auto& p : parts) {
    sums.push_back(p.acc);
    if (dump)
      dump->insert(dump->end(), p.rows.begin(), p.rows.end());
  }
  return detail::bernoulli_estimate(sums, cfg);
}

/// Fraction of grid points (step 0.01/mu) of a probe interval covered by the
/// (superposed) Boolean model; one fraction per trial, i.i.d. stderr across
/// trials. Expected value: 1 - exp(-sum 2*lambda_b/mu).
inline SimEstimate sim_volume_fraction(const SimConfig& cfg) {
  cfg.validate();
  const double mmin = detail::mu_min(cfg.params);
  const double step = 0.01 / mmin;
  const double L = cfg.probe_length > 0.0 ? cfg.probe_length : 2000.0 / mmin;
  const std::int64_t n_pts = static_cast<std::int64_t>(std::floor(L / step)) + 1;

  auto parts = run_partitioned(
      cfg.n_trials, cfg.workers,
      [&](std::int64_t t0, std::int64_t t1) {
        std::vector<double> fractions;
        fractions.reserve(static_cast<std::size_t>(t1 - t0));
        for (std::int64_t t = t0; t < t1; ++t) {
          RandomStream rng = RandomStream::substream(cfg.seed, std::uint64_t(t));
          const ObstacleSet obs = sample_obstacles(cfg.params, 0.0, L, rng);
          // Merge intervals across lanes, then count grid points inside.
          std::vector<std::pair<double, double>> iv;
          for (const LaneObstacles& lane : obs.lanes)
            for (const Obstacle& o : lane.obstacles)
              iv.emplace_back(o.lo(), o.hi());
          std::sort(iv.begin(), iv.end());
          std::int64_t covered = 0;
          bool open = false;
          double cur_lo = 0.0, cur_hi = 0.0;
          auto flush = [&] {
            if (!open) return;
            const std::int64_t i0 =
                std::max<std::int64_t>(0, static_cast<std::int64_t>(
                                              std::ceil(cur_lo / step)));
            const std::int64_t i1 = std::min<std::int64_t>(
                n_pts - 1, static_cast<std::int64_t>(std::floor(cur_hi / step)));
            if (i1 >= i0) covered += i1 - i0 + 1;
            open = false;
          };
          for (const auto& [lo, hi] : iv) {
            if (!open || lo > cur_hi) {
              flush();
              cur_lo = lo;
              cur_hi = hi;
              open = true;
            } else {
              cur_hi = std::max(cur_hi, hi);
            }
          }
          flush();
          fractions.push_back(double(covered) / double(n_pts));
        }
        return fractions;
      });
  double sum = 0.0, sumsq = 0.0;
  std::int64_t n = 0;
  for (const auto& p : parts)
    for (double f : p) {
      sum += f;
      sumsq += f * f;
      ++n;
    }
  SimEstimate est;
  est.value = n > 0 ? sum / double(n) : 0.0;
  if (n > 1) {
    const double var = std::max(0.0, (sumsq - sum * sum / double(n)) / double(n - 1));
    est.stderr_ = std::sqrt(var / double(n));
  }
  est.n_trials = n;
  est.seed = cfg.seed;
  est.mode = cfg.mode;
  return est;
}

/// Time-averaged LOS indicator of a single moving receiver w.r.t. a static
/// transmitter at (tx_x, d1+d2), over one long realization in which obstacles
/// drift at +-v_o (direction chosen uniformly at time 0). The ergodic limit
/// is the snapshot LOS probability. stderr via batch means (30 batches,
/// since step samples are autocorrelated).
inline SimEstimate sim_ergodic_los(const SimConfig& cfg, double tx_x) {
  cfg.validate();
  const ScenarioParams& p = cfg.params;
  if (!(p.v > 0.0 || p.v_o > 0.0))
    throw ConfigError("v_mps",
                      "ergodic mode requires receiver or obstacle motion");
  const double H = p.total_height();
  const double mmin = detail::mu_min(p);

  // Projection of the path crossing for lane h moves at v*(1 - h/H);
  // obstacles add +-v_o of relative motion.
  double mix_speed = 0.0;
  for (const Lane& ln : p.lanes)
    mix_speed = std::max(mix_speed, p.v * (1.0 - ln.height / H) + p.v_o);
  if (!(mix_speed > 0.0))
    throw ConfigError("v_mps", "no relative motion between paths and obstacles");

  const double horizon =
      cfg.horizon_s > 0.0 ? cfg.horizon_s : (1e4 / mmin) / mix_speed;
  const double dt = cfg.dt_s > 0.0 ? cfg.dt_s : (0.05 / mmin) / mix_speed;
  std::int64_t steps = static_cast<std::int64_t>(std::ceil(horizon / dt));
  steps = std::min<std::int64_t>(steps, 20'000'000);

  // Each lane splits into two rigidly drifting groups (direction +-1) of
  // intensity lambda_b/2; a group is static in its own moving frame, so each
  // step is an interval-stabbing query at
  //   q(t) = xhat(t) - dir*v_o*t,   xhat(t) = tx*(h/H) + v*t*(1 - h/H).
  struct Group {
    IntervalIndex index;
    double q0 = 0.0;     // q(0)
    double slope = 0.0;  // dq/dt
  };
  std::vector<Group> groups;
  std::uint64_t group_id = 0;
  for (const Lane& ln : p.lanes) {
    for (int dir : {+1, -1}) {
      Group g;
      g.q0 = tx_x * (ln.height / H);
      g.slope = p.v * (1.0 - ln.height / H) - dir * p.v_o;
      const double qa = g.q0, qb = g.q0 + g.slope * horizon;
      const double lo = std::min(qa, qb), hi = std::max(qa, qb);
      RandomStream rng = RandomStream::substream(cfg.seed, 0xE000 + group_id++);
      Lane half = ln;
      half.lambda_b = ln.lambda_b / 2.0;
      LaneObstacles sampled = sample_lane(half, lo, hi, rng);
      g.index = IntervalIndex(sampled.obstacles);
      groups.push_back(std::move(g));
    }
  }

  // Equal-size batches only; the step count is rounded down to a multiple
  // of the batch count so every batch mean carries the same weight.
  constexpr int kBatches = 30;
  const std::int64_t batch = std::max<std::int64_t>(1, steps / kBatches);
  steps = batch * std::min<std::int64_t>(kBatches, steps);
  std::vector<double> batch_means;
  double bsum = 0.0;
  std::int64_t bcount = 0;
  double total = 0.0;
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t = double(i) * dt;
    bool covered = false;
    for (const Group& g : groups) {
      if (g.index.covers(g.q0 + g.slope * t)) {
        covered = true;
        break;
      }
    }
    const double los = covered ? 0.0 : 1.0;
    total += los;
    bsum += los;
    if (++bcount == batch) {
      batch_means.push_back(bsum / double(bcount));
      bsum = 0.0;
      bcount = 0;
    }
  }

  SimEstimate est;
  est.value = steps > 0 ? total / double(steps) : 0.0;
  const std::size_t b = batch_means.size();
  if (b > 1) {
    double m = 0.0;
    for (double x : batch_means) m += x;
    m /= double(b);
    double var = 0.0;
    for (double x : batch_means) var += (x - m) * (x - m);
    var /= double(b - 1);
    est.stderr_ = std::sqrt(var / double(b));
  }
  est.n_trials = steps;
  est.seed = cfg.seed;
  est.mode = SimMode::ergodic;
  return est;
}

}  // namespace losline
