#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "losline/params.hpp"

namespace losline {

/// x-coordinate where the straight path from a receiver at (receiver_x, 0)
/// to a transmitter at (tx_x, total_height) crosses the horizontal line
/// y = height.
inline double project_to_height(double tx_x, double receiver_x, double height,
                                double total_height) {
  return receiver_x + (tx_x - receiver_x) * (height / total_height);
}

/// Projection of a transmitter onto the obstacle line y = d1. For a receiver
/// at the origin this is the usual x_hat = x * d1 / (d1 + d2).
inline double project_tx(double tx_x, double d1, double d2,
                         double receiver_x = 0.0) {
  return project_to_height(tx_x, receiver_x, d1, d1 + d2);
}

/// One Boolean-model segment: occupies [center - left_len, center + right_len]
/// on its lane. Obstacles have zero width (pure segments).
struct Obstacle {
  double center = 0.0;
  double left_len = 0.0;   // distance from center to left end
  double right_len = 0.0;  // distance from center to right end

  double lo() const { return center - left_len; }
  double hi() const { return center + right_len; }
};

/// Static interval-stabbing index: intervals sorted by left end with a prefix
/// max of right ends, so covers() is a binary search.
class IntervalIndex {
 public:
  IntervalIndex() = default;

  explicit IntervalIndex(const std::vector<Obstacle>& obs) {
    lo_.reserve(obs.size());
    hi_prefix_max_.reserve(obs.size());
    std::vector<std::pair<double, double>> iv;
    iv.reserve(obs.size());
    for (const Obstacle& o : obs) iv.emplace_back(o.lo(), o.hi());
    std::sort(iv.begin(), iv.end());
    double running = -std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : iv) {
      running = std::max(running, hi);
      lo_.push_back(lo);
      hi_prefix_max_.push_back(running);
    }
  }

  /// True iff some interval contains x (closed-interval containment).
  bool covers(double x) const {
    auto it = std::upper_bound(lo_.begin(), lo_.end(), x);
    if (it == lo_.begin()) return false;
    return hi_prefix_max_[static_cast<std::size_t>(it - lo_.begin()) - 1] >= x;
  }

 private:
  std::vector<double> lo_;
  std::vector<double> hi_prefix_max_;
};

/// Sampled obstacles of one lane, sorted by center, with a stabbing index.
struct LaneObstacles {
  double height = 0.0;
  std::vector<Obstacle> obstacles;  // sorted by center
  IntervalIndex index;

  void build_index() { index = IntervalIndex(obstacles); }
  bool covers(double x) const { return index.covers(x); }
};

/// A time-frozen realization of the (possibly multi-lane) Boolean model.
/// Centers live on [window_lo - margin, window_hi + margin]; the margin
/// absorbs segments reaching into the window from outside.
struct ObstacleSet {
  std::vector<LaneObstacles> lanes;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double margin = 0.0;  // largest per-lane sampling margin
};

/// Exact geometric blockage: the path receiver -> transmitter is blocked iff
/// its crossing point on some lane falls inside an obstacle segment there.
inline bool is_blocked(const ObstacleSet& obstacles, double tx_x,
                       double receiver_x, double total_height) {
  for (const LaneObstacles& lane : obstacles.lanes) {
    const double x_at =
        project_to_height(tx_x, receiver_x, lane.height, total_height);
    if (lane.covers(x_at)) return true;
  }
  return false;
}

/// Ordered transmitter x-coordinates on the line y = d1 + d2. Ties are
/// allowed (coincident transmitters are a meaningful degenerate case).
struct TransmitterSet {
  std::vector<double> xs;  // nondecreasing

  static TransmitterSet from_unsorted(std::vector<double> positions) {
    std::sort(positions.begin(), positions.end());
    return TransmitterSet{std::move(positions)};
  }

  std::size_t size() const { return xs.size(); }

  /// Projections x_hat onto y = d1 for a receiver at receiver_x.
  std::vector<double> projections(double d1, double d2,
                                  double receiver_x = 0.0) const {
    std::vector<double> xhat;
    xhat.reserve(xs.size());
    for (double x : xs) xhat.push_back(project_tx(x, d1, d2, receiver_x));
    return xhat;
  }
};

}  // namespace losline
