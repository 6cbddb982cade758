// Minimal library tour: closed forms, a coverage query, and the simulator
// cross-check, all on one scenario.

#include <iostream>

#include "losline/losline.hpp"

int main() {
  using namespace losline;

  ScenarioParams params;
  params.lambda_t = 4.0 / 1000.0;           // 4 transmitters per km
  params.lanes = {Lane{20.0 / 1000.0, 0.4, 10.0}};  // 20 obstacles/km, mean half-length 2.5 m
  params.d1 = 10.0;
  params.d2 = 10.0;
  params.radio = radio_from_d_star(1500.0);

  const Lane& lane = params.lanes.front();
  std::cout << "single-transmitter LOS: " << los_prob_single(lane.lambda_b, lane.mu)
            << "\n";
  std::cout << "pair LOS at 10 m separation: " << los_prob_pair(params, 0.0, 10.0)
            << "\n";

  CoverageQuery q;
  q.params = params;
  q.budget.mc_trials = 20000;
  q.seed = 42;
  const CoverageResult full = full_coverage_prob(q);
  std::cout << "full LOS coverage (conditional MC): " << full.estimate.value
            << " stderr " << full.estimate.stderr_.value_or(0.0) << "\n";

  SimConfig sim{params, 20000, 42};
  const SimEstimate direct = sim_coverage(sim, SimCoverageKind::full);
  std::cout << "full LOS coverage (direct simulation): " << direct.value
            << " stderr " << direct.stderr_ << "\n";
  return 0;
}
