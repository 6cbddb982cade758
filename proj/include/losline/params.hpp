#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "losline/errors.hpp"

namespace losline {

/// Radio-link constants, all in linear units.
struct RadioParams {
  double p = 1.0;          // transmit power
  double sigma = 1.0;      // noise power
  double alpha_los = 2.0;  // path-loss exponent
  double tau = 1.0;        // SNR detection threshold

  void validate() const {
    if (!(p > 0.0)) throw ConfigError("p", "transmit power must be > 0");
    if (!(sigma > 0.0)) throw ConfigError("sigma", "noise power must be > 0");
    if (!(alpha_los > 0.0))
      throw ConfigError("alpha_los", "path-loss exponent must be > 0");
    if (!(tau > 0.0)) throw ConfigError("tau", "SNR threshold must be > 0");
  }
};

/// One obstacle lane: a Boolean model of intensity lambda_b whose segment
/// half-lengths are Exp(mu), living on the horizontal line y = height.
struct Lane {
  double lambda_b = 0.0;  // obstacle-center intensity, 1/m
  double mu = 1.0;        // inverse mean half-length, 1/m
  double height = 0.0;    // lane line y-coordinate, m
};

/// Full scenario: receiver line at y=0, obstacle lane(s) strictly between,
/// transmitter line at y = d1 + d2. Intensities are per meter.
struct ScenarioParams {
  double lambda_t = 0.0;  // transmitter intensity on y = d1+d2
  double lambda_v = 0.0;  // receiver intensity on the x-axis
  std::vector<Lane> lanes;
  double d1 = 10.0;  // receiver line to obstacle line, m
  double d2 = 10.0;  // obstacle line to transmitter line, m
  RadioParams radio;
  double v = 0.0;    // receiver speed, m/s (ergodic mode only)
  double v_o = 0.0;  // obstacle speed, m/s (ergodic mode only)
  bool allow_small_geometry = false;  // lifts the d1,d2 >= 1 m check

  double total_height() const { return d1 + d2; }

  void validate() const {
    if (!(lambda_t >= 0.0))
      throw ConfigError("lambda_t_per_km", "transmitter intensity must be >= 0");
    if (!(lambda_v >= 0.0))
      throw ConfigError("lambda_v_per_km", "receiver intensity must be >= 0");
    if (!(d1 > 0.0) || !(d2 > 0.0))
      throw ConfigError("d1_m", "d1 and d2 must be positive");
    if (!allow_small_geometry && (d1 < 1.0 || d2 < 1.0))
      throw ConfigError("d1_m",
                        "d1 and d2 must be >= 1 m (set allow_small_geometry = "
                        "true to override)");
    if (lanes.empty())
      throw ConfigError("lambda_b_per_km", "at least one obstacle lane required");
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      const Lane& ln = lanes[i];
      if (!(ln.lambda_b >= 0.0))
        throw ConfigError("lambda_b_per_km", "lane " + std::to_string(i) +
                                                 ": intensity must be >= 0");
      if (!(ln.mu > 0.0))
        throw ConfigError("mean_half_length_m", "lane " + std::to_string(i) +
                                                    ": mu must be > 0");
      if (!(ln.height > 0.0) || !(ln.height < total_height()))
        throw ConfigError("lane_heights_m",
                          "lane " + std::to_string(i) +
                              ": height must lie strictly between 0 and d1+d2");
    }
    radio.validate();
  }

  /// The closed-form joint-LOS expressions cover a single obstacle lane.
  const Lane& single_lane() const {
    if (lanes.size() != 1)
      throw ConfigError("lambda_b_per_km",
                        "closed-form joint LOS requires a single obstacle lane; "
                        "use the simulator for multi-lane scenarios");
    return lanes.front();
  }
};

/// Maximum distance at which a transmitter is detectable:
/// d* = (p / (sigma * tau))^(1/alpha_los).
inline double detect_radius(const RadioParams& radio) {
  radio.validate();
  return std::pow(radio.p / (radio.sigma * radio.tau), 1.0 / radio.alpha_los);
}

/// Length xi of the detectable segment of the transmitter line:
/// xi = 2*sqrt(d*^2 - (d1+d2)^2). The segment is [-xi/2, xi/2].
inline double window_length(double d_star, double d1, double d2) {
  const double h = d1 + d2;
  if (!(d_star > h))
    throw NoDetectableRegion(
        "no detectable region: d_star <= d1 + d2 (d_star = " +
        std::to_string(d_star) + ", d1 + d2 = " + std::to_string(h) + ")");
  return 2.0 * std::sqrt(d_star * d_star - h * h);
}

/// Convenience for scenario files that specify d_star_m directly: a radio
/// triple whose detectability radius is exactly d_star (p = sigma = 1,
/// alpha = 2, tau = d_star^-2).
inline RadioParams radio_from_d_star(double d_star) {
  if (!(d_star > 0.0)) throw ConfigError("d_star_m", "d_star must be > 0");
  RadioParams r;
  r.p = 1.0;
  r.sigma = 1.0;
  r.alpha_los = 2.0;
  r.tau = 1.0 / (d_star * d_star);
  return r;
}

}  // namespace losline
