#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "losline/geometry.hpp"
#include "losline/params.hpp"

namespace losline {

// Closed-form joint-LOS probabilities of the typical receiver at the origin,
// for fixed transmitter positions on y = d1 + d2 over a single obstacle lane.
//
// With sorted projections x_hat_1 <= ... <= x_hat_n on the obstacle line and
// gaps D_k = x_hat_k - x_hat_{k-1}:
//
//   P(all n LOS) = exp( -2*lambda_b*n/mu
//                       + sum_{k=2..n} (2/mu + D_k) * lambda_b * e^{-mu D_k} )
//
// which factorizes as P(L_1) * prod_k P(L_k | L_{k-1}): each gap contributes
// log-factor -2*lambda_b/mu + (2/mu + D)*lambda_b*e^{-mu D}. The exponent is
// always <= 0, so a single exp() suffices.

/// P(single transmitter LOS) = exp(-2*lambda_b/mu); independent of where the
/// transmitter sits.
inline double los_prob_single(double lambda_b, double mu) {
  return std::exp(-2.0 * lambda_b / mu);
}

/// Independent lanes superpose: the exponents add. Lane heights drop out
/// because a single-point hit probability is scale-invariant.
inline double los_prob_single_multilane(std::span<const Lane> lanes) {
  double expo = 0.0;
  for (const Lane& ln : lanes) expo -= 2.0 * ln.lambda_b / ln.mu;
  return std::exp(expo);
}

/// log P(L_k | L_{k-1}) for a projected gap D >= 0.
inline double joint_gap_log_factor(double lambda_b, double mu, double gap) {
  return -2.0 * lambda_b / mu +
         (2.0 / mu + gap) * lambda_b * std::exp(-mu * gap);
}

/// Joint-LOS exponent for sorted projections (log of the probability).
inline double joint_los_log_prob(double lambda_b, double mu,
                                 std::span<const double> xhat_sorted) {
  if (xhat_sorted.empty()) return 0.0;
  double expo = -2.0 * lambda_b / mu;
  for (std::size_t k = 1; k < xhat_sorted.size(); ++k)
    expo += joint_gap_log_factor(lambda_b, mu,
                                 xhat_sorted[k] - xhat_sorted[k - 1]);
  return expo;
}

/// P(all transmitters LOS) from sorted projections on the obstacle line.
inline double los_prob_joint_projected(double lambda_b, double mu,
                                       std::span<const double> xhat_sorted) {
  return std::exp(joint_los_log_prob(lambda_b, mu, xhat_sorted));
}

/// Two transmitters at x1, x2 (swapped if needed):
/// exp(-4 lb/mu + (2 lb/mu) e^{-mu D} + lb D e^{-mu D}), D = |xhat2 - xhat1|.
inline double los_prob_pair(const ScenarioParams& params, double x1,
                            double x2) {
  const Lane& lane = params.single_lane();
  if (x2 < x1) std::swap(x1, x2);
  const double xh[2] = {project_tx(x1, params.d1, params.d2),
                        project_tx(x2, params.d1, params.d2)};
  return los_prob_joint_projected(lane.lambda_b, lane.mu, xh);
}

/// P(all n transmitters LOS); raw positions are projected internally.
inline double los_prob_joint(const ScenarioParams& params,
                             const TransmitterSet& txs) {
  const Lane& lane = params.single_lane();
  const std::vector<double> xhat = txs.projections(params.d1, params.d2);
  return los_prob_joint_projected(lane.lambda_b, lane.mu, xhat);
}

}  // namespace losline
