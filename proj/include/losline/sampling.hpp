#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "losline/geometry.hpp"
#include "losline/params.hpp"
#include "losline/rng.hpp"

namespace losline {

/// Centers are sampled on the window extended by 20/mu on each side, so the
/// probability that an omitted outside obstacle reaches the window is < e^-20.
inline double edge_margin(double mu) { return 20.0 / mu; }

/// One lane's Boolean model on [lo - margin, hi + margin]: Poisson centers,
/// i.i.d. Exp(mu) half-lengths (full lengths are Erlang-2 with mean 2/mu).
inline LaneObstacles sample_lane(const Lane& lane, double lo, double hi,
                                 RandomStream& rng) {
  LaneObstacles out;
  out.height = lane.height;
  const double m = edge_margin(lane.mu);
  std::vector<double> centers =
      rng.poisson_process(lane.lambda_b, lo - m, hi + m);
  out.obstacles.reserve(centers.size());
  for (double c : centers) {
    const double left = rng.exponential(lane.mu);
    const double right = rng.exponential(lane.mu);
    out.obstacles.push_back(Obstacle{c, left, right});
  }
  out.build_index();
  return out;
}

/// Full multi-lane realization, deterministic given the stream state.
/// Lanes are sampled in order from the same stream.
inline ObstacleSet sample_obstacles(const ScenarioParams& params, double lo,
                                    double hi, RandomStream& rng) {
  ObstacleSet set;
  set.window_lo = lo;
  set.window_hi = hi;
  for (const Lane& lane : params.lanes) {
    set.lanes.push_back(sample_lane(lane, lo, hi, rng));
    set.margin = std::max(set.margin, edge_margin(lane.mu));
  }
  return set;
}

inline ObstacleSet sample_obstacles(const ScenarioParams& params, double lo,
                                    double hi, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample_obstacles(params, lo, hi, rng);
}

/// Transmitter PPP on a segment of the line y = d1 + d2; sorted positions.
inline std::vector<double> sample_transmitters(double lambda_t, double lo,
                                               double hi, RandomStream& rng) {
  return rng.poisson_process(lambda_t, lo, hi);
}

}  // namespace losline
