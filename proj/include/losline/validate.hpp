#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "losline/analytic_los.hpp"
#include "losline/coverage.hpp"
#include "losline/estimate.hpp"
#include "losline/params.hpp"
#include "losline/sampling.hpp"
#include "losline/simulator.hpp"

namespace losline {

/// One machine-readable invariant check: measured deviation vs threshold.
struct CheckRow {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckRow> rows;
  bool all_pass() const {
    for (const CheckRow& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

namespace detail {

inline void add_check(ValidationReport& rep, const std::string& name,
                      double measured, double threshold,
                      const std::string& detail = "") {
  rep.rows.push_back(CheckRow{name, measured, threshold,
                              measured <= threshold, detail});
}

}  // namespace detail

/// Cross-checks the closed forms, the samplers, and the coverage evaluators
/// against each other on the given scenario. Stochastic rows use 3-sigma
/// thresholds; algebraic identities use tight absolute tolerances.
inline ValidationReport run_validation(const ScenarioParams& params,
                                       std::int64_t trials = 20000,
                                       std::uint64_t seed = 2026) {
  params.validate();
  ValidationReport rep;
  const bool single_lane = params.lanes.size() == 1;
  const double H = params.total_height();

  SimConfig sim;
  sim.params = params;
  sim.n_trials = trials;
  sim.seed = seed;

  // Closed form vs simulator, single transmitter (multi-lane aware: the
  // superposition product is the closed form either way).
  {
    const double closed = los_prob_single_multilane(params.lanes);
    const SimEstimate mc = sim_los_single(sim, 120.0);
    detail::add_check(rep, "single_los_closed_vs_mc",
                      std::abs(closed - mc.value), 3.0 * mc.stderr_ + 1e-12,
                      "closed " + std::to_string(closed) + " mc " +
                          std::to_string(mc.value));
  }

  if (single_lane) {
    const Lane& lane = params.lanes.front();
    const double p1 = los_prob_single(lane.lambda_b, lane.mu);

    {  // pair formula vs simulator at a gap of ~3 mean half-lengths
      const double x2 = (3.0 / lane.mu) * (H / params.d1);
      const double closed = los_prob_pair(params, 0.0, x2);
      SimConfig s2 = sim;
      s2.seed = substream_seed(seed, 2);
      const SimEstimate mc =
          sim_joint_los(s2, TransmitterSet::from_unsorted({0.0, x2}));
      detail::add_check(rep, "pair_los_closed_vs_mc", std::abs(closed - mc.value),
                        3.0 * mc.stderr_ + 1e-12);
    }
    {  // n = 4 layout
      const std::vector<double> xs = {-80.0, -15.0, 40.0, 90.0};
      const TransmitterSet txs = TransmitterSet::from_unsorted(xs);
      const double closed = los_prob_joint(params, txs);
      SimConfig s3 = sim;
      s3.seed = substream_seed(seed, 3);
      const SimEstimate mc = sim_joint_los(s3, txs);
      detail::add_check(rep, "joint_los_closed_vs_mc", std::abs(closed - mc.value),
                        3.0 * mc.stderr_ + 1e-12);
    }
    {  // coincident transmitters collapse to the single-transmitter value
      const TransmitterSet txs{std::vector<double>(5, 37.5)};
      detail::add_check(rep, "coincident_joint_equals_single",
                        std::abs(los_prob_joint(params, txs) - p1),
                        1e-13 + 1e-13 * p1);
    }
    {  // joint nonincreasing as a gap grows; bounds p1^n <= joint <= p1
      RandomStream rng(substream_seed(seed, 4));
      double worst_mono = 0.0, worst_bound = 0.0;
      for (int rep_i = 0; rep_i < 50; ++rep_i) {
        std::vector<double> xs;
        const int n = 2 + int(rng.bits() % 5);
        for (int i = 0; i < n; ++i) xs.push_back(rng.uniform(-150.0, 150.0));
        TransmitterSet txs = TransmitterSet::from_unsorted(xs);
        const double v = los_prob_joint(params, txs);
        TransmitterSet wide = txs;
        wide.xs.back() += rng.uniform(1.0, 50.0);  // grow the last gap
        worst_mono = std::max(worst_mono, los_prob_joint(params, wide) - v);
        worst_bound = std::max(worst_bound, std::pow(p1, n) - v);
        worst_bound = std::max(worst_bound, v - p1);
      }
      detail::add_check(rep, "joint_monotone_in_gap", worst_mono, 1e-14);
      detail::add_check(rep, "joint_bounds_sandwich", worst_bound, 1e-14);
    }
    {  // translation invariance and reflection symmetry
      const std::vector<double> xs = {-40.0, 10.0, 95.0};
      const TransmitterSet txs = TransmitterSet::from_unsorted(xs);
      const double v = los_prob_joint(params, txs);
      std::vector<double> shifted, reflected;
      for (double x : xs) shifted.push_back(x + 333.25);
      for (double x : xs) reflected.push_back(-x);
      const double vs =
          los_prob_joint(params, TransmitterSet::from_unsorted(shifted));
      const double vr =
          los_prob_joint(params, TransmitterSet::from_unsorted(reflected));
      detail::add_check(rep, "joint_translation_invariance", std::abs(vs - v), 1e-12);
      detail::add_check(rep, "joint_reflection_symmetry", std::abs(vr - v), 1e-12);
    }
  }

  {  // geometric blockage is translation-equivariant
    RandomStream rng(substream_seed(seed, 5));
    int mismatches = 0;
    for (int i = 0; i < 200; ++i) {
      const double tx = rng.uniform(-100.0, 100.0);
      const double shift = rng.uniform(-500.0, 500.0);
      RandomStream sampler(substream_seed(seed, 600 + std::uint64_t(i)));
      ObstacleSet obs = sample_obstacles(params, -120.0, 120.0, sampler);
      ObstacleSet moved = obs;
      for (LaneObstacles& lane : moved.lanes) {
        for (Obstacle& o : lane.obstacles) o.center += shift;
        lane.build_index();
      }
      const bool a = is_blocked(obs, tx, 0.0, H);
      const bool b = is_blocked(moved, tx + shift, shift, H);
      if (a != b) ++mismatches;
    }
    detail::add_check(rep, "blockage_translation_equivariance", mismatches, 0.0);
  }

  {  // sampler determinism
    const ObstacleSet a = sample_obstacles(params, -500.0, 500.0, seed + 9);
    const ObstacleSet b = sample_obstacles(params, -500.0, 500.0, seed + 9);
    double max_diff = 0.0;
    bool same_shape = a.lanes.size() == b.lanes.size();
    for (std::size_t l = 0; same_shape && l < a.lanes.size(); ++l) {
      same_shape = a.lanes[l].obstacles.size() == b.lanes[l].obstacles.size();
      for (std::size_t i = 0; same_shape && i < a.lanes[l].obstacles.size(); ++i) {
        const Obstacle &oa = a.lanes[l].obstacles[i], &ob = b.lanes[l].obstacles[i];
        max_diff = std::max({max_diff, std::abs(oa.center - ob.center),
                             std::abs(oa.left_len - ob.left_len),
                             std::abs(oa.right_len - ob.right_len)});
      }
    }
    detail::add_check(rep, "sampler_determinism", same_shape ? max_diff : 1.0, 0.0);
  }

  {  // Poisson obstacle counts on the extended window
    const Lane& lane = params.lanes.front();
    const double win = 5000.0;
    const double mean_one =
        lane.lambda_b * (2.0 * win + 2.0 * edge_margin(lane.mu));
    const int draws = 400;
    double count_sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      RandomStream rng(substream_seed(seed, 1000 + std::uint64_t(i)));
      count_sum += double(sample_lane(lane, -win, win, rng).obstacles.size());
    }
    const double z = std::abs(count_sum / draws - mean_one) /
                     std::sqrt(mean_one / draws);
    detail::add_check(rep, "obstacle_count_poisson_mean", z, 3.0);
  }

  {  // half-length and full-length moments (Exp(mu) halves, Erlang-2 total)
    const Lane& lane = params.lanes.front();
    RandomStream rng(substream_seed(seed, 7));
    const LaneObstacles lo = sample_lane(lane, 0.0, 40000.0 / lane.mu, rng);
    double half_sum = 0.0, full_sum = 0.0;
    for (const Obstacle& o : lo.obstacles) {
      half_sum += o.left_len + o.right_len;
      full_sum += o.hi() - o.lo();
    }
    const double m = double(lo.obstacles.size());
    if (m > 100) {
      const double half_mean = half_sum / (2.0 * m);
      const double z_half = std::abs(half_mean - 1.0 / lane.mu) /
                            (1.0 / (lane.mu * std::sqrt(2.0 * m)));
      const double full_mean = full_sum / m;
      const double z_full = std::abs(full_mean - 2.0 / lane.mu) /
                            (std::sqrt(2.0) / (lane.mu * std::sqrt(m)));
      detail::add_check(rep, "half_length_mean", z_half, 3.0);
      detail::add_check(rep, "full_length_mean", z_full, 3.0);
    }
  }

  if (params.lambda_v > 0.0) {
    // Receiver projections toward a tagged transmitter form a PPP of
    // intensity lambda_v * (d1+d2)/d2 on the obstacle line.
    const double rate = params.lambda_v * H / params.d2;
    const double interval = 400.0;
    const int draws = 500;
    double count_sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      RandomStream rng(substream_seed(seed, 2000 + std::uint64_t(i)));
      // receivers whose projections can land in [0, interval]
      const double span = interval / (params.d2 / H) + 200.0;
      const std::vector<double> recv =
          rng.poisson_process(params.lambda_v, -span, span);
      const double tagged_tx = 0.0;
      for (double z : recv) {
        const double proj = project_to_height(tagged_tx, z, params.d1, H);
        if (proj >= 0.0 && proj <= interval) count_sum += 1.0;
      }
    }
    const double mean_one = rate * interval;
    const double z = std::abs(count_sum / draws - mean_one) /
                     std::sqrt(mean_one / draws);
    detail::add_check(rep, "receiver_projection_intensity", z, 3.0);
  }

  {  // volume fraction of the (superposed) Boolean model
    SimConfig vf = sim;
    vf.n_trials = std::min<std::int64_t>(trials, 200);
    vf.seed = substream_seed(seed, 8);
    const SimEstimate mc = sim_volume_fraction(vf);
    const double closed = 1.0 - los_prob_single_multilane(params.lanes);
    detail::add_check(rep, "volume_fraction_closed_vs_mc",
                      std::abs(closed - mc.value), 3.0 * mc.stderr_ + 1e-12);
  }

  // Coverage cross-checks need a detectable region and transmitters.
  bool coverage_applicable = params.lambda_t > 0.0;
  if (coverage_applicable) {
    try {
      window_length(detect_radius(params.radio), params.d1, params.d2);
    } catch (const NoDetectableRegion&) {
      coverage_applicable = false;
    }
  }
  if (coverage_applicable && single_lane) {
    const Lane& lane = params.lanes.front();
    CoverageQuery q;
    q.params = params;
    q.budget.mc_trials = trials;
    q.budget.simplex_samples_per_n = std::max<std::int64_t>(2000, trials / 10);
    q.seed = substream_seed(seed, 10);
    q.analytic_n_cap = 64;

    CoverageQuery qmc = q;
    qmc.method = CoverageMethod::conditional_mc;
    CoverageQuery qquad = q;
    qquad.method = CoverageMethod::quadrature;
    CoverageQuery qsim = q;
    qsim.method = CoverageMethod::simulate;
    qsim.seed = substream_seed(seed, 11);

    const CoverageResult full_mc = full_coverage_prob(qmc);
    const CoverageResult full_quad = full_coverage_prob(qquad);
    const CoverageResult full_sim = full_coverage_prob(qsim);
    const double se_mc = full_mc.estimate.stderr_.value_or(0.0);
    const double se_quad = full_quad.estimate.stderr_.value_or(0.0);
    const double se_sim = full_sim.estimate.stderr_.value_or(0.0);
    detail::add_check(
        rep, "coverage_evaluators_agree",
        std::abs(full_mc.estimate.value - full_quad.estimate.value),
        3.0 * std::sqrt(se_mc * se_mc + se_quad * se_quad) + q.eps_tail);
    detail::add_check(
        rep, "coverage_analytic_vs_sim",
        std::abs(full_mc.estimate.value - full_sim.estimate.value),
        3.0 * std::sqrt(se_mc * se_mc + se_sim * se_sim) + 1e-12);

    {  // ordering: full <= at-least-2 <= at-least-1
      CoverageQuery q1 = qmc;
      q1.k = 1;
      CoverageQuery q2 = qmc;
      q2.k = 2;
      const double v_full = full_mc.estimate.value;
      const double v1 = k_los_prob(q1).estimate.value;
      const double v2 = k_los_prob(q2).estimate.value;
      const double violation = std::max(v_full - v2, v2 - v1);
      detail::add_check(rep, "coverage_ordering_full_k2_k1", violation, 1e-12,
                        "full " + std::to_string(v_full) + " k2 " +
                            std::to_string(v2) + " k1 " + std::to_string(v1));
    }
    {  // truncation soundness: deeper truncation moves the value < eps_tail
      CoverageQuery qa = qquad;
      qa.eps_tail = 1e-6;
      CoverageQuery qb = qquad;
      qb.eps_tail = 1e-10;
      const double va = full_coverage_prob(qa).estimate.value;
      const double vb = full_coverage_prob(qb).estimate.value;
      detail::add_check(rep, "poisson_truncation_soundness", std::abs(va - vb),
                        1e-6);
    }
    {  // denser/longer obstacles cannot raise coverage (common random numbers
       // make the comparison exact: per-trial values drop pointwise)
      CoverageQuery qa = qmc;
      CoverageQuery qb = qmc;
      qb.params.lanes[0].lambda_b *= 1.5;
      CoverageQuery qc = qmc;
      qc.params.lanes[0].mu /= 1.5;
      const double va = full_coverage_prob(qa).estimate.value;
      const double vb = full_coverage_prob(qb).estimate.value;
      const double vc = full_coverage_prob(qc).estimate.value;
      detail::add_check(rep, "coverage_monotone_in_lambda_b", vb - va, 1e-12);
      detail::add_check(rep, "coverage_monotone_in_mean_length", vc - va, 1e-12);
    }
    {  // at-least-1 with two fixed transmitters: 2*p1 - pair
      const double x2 = (2.0 / lane.mu) * (H / params.d1);
      const double xhat[2] = {0.0, 2.0 / lane.mu};
      const double direct = at_least_k_los_given_projections(
          lane.lambda_b, lane.mu, xhat, 1, 16);
      const double expected = 2.0 * los_prob_single(lane.lambda_b, lane.mu) -
                              los_prob_pair(params, 0.0, x2);
      detail::add_check(rep, "k1_two_tx_inclusion_exclusion",
                        std::abs(direct - expected), 1e-12);
    }
    {  // Bonferroni partial sums bracket the converged value
      RandomStream rng(substream_seed(seed, 12));
      double worst = 0.0;
      for (int rep_i = 0; rep_i < 20; ++rep_i) {
        const int n = 3 + int(rng.bits() % 5);
        std::vector<double> xh;
        double x = 0.0;
        for (int i = 0; i < n; ++i) {
          xh.push_back(x);
          x += rng.exponential(lane.mu / 2.0);
        }
        for (int k = 1; k <= std::min(3, n); ++k) {
          std::vector<double> partials;
          const double v = at_least_k_los_given_projections(
              lane.lambda_b, lane.mu, xh, k, 16, &partials);
          for (std::size_t j = 0; j < partials.size(); ++j) {
            // even index = positive last term = upper bound, odd = lower
            const double gap =
                (j % 2 == 0) ? v - partials[j] : partials[j] - v;
            worst = std::max(worst, gap);
          }
        }
      }
      detail::add_check(rep, "bonferroni_partial_sums_bracket", worst, 1e-10);
    }
  }

  if ((params.v > 0.0 || params.v_o > 0.0) && single_lane) {
    SimConfig erg = sim;
    erg.mode = SimMode::ergodic;
    erg.seed = substream_seed(seed, 13);
    // short horizon for the report; the acceptance suite runs the long one
    const double mmin = params.lanes.front().mu;
    double mix = params.v * (params.d2 / H) + params.v_o;
    erg.horizon_s = (2000.0 / mmin) / mix;
    const SimEstimate e = sim_ergodic_los(erg, 150.0);
    const double closed = los_prob_single_multilane(params.lanes);
    detail::add_check(rep, "ergodic_time_average_vs_closed",
                      std::abs(e.value - closed), 3.0 * e.stderr_ + 1e-12);
  }

  return rep;
}

/// CSV form of the report: name,measured,threshold,pass.
inline void write_report_csv(const ValidationReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("out", "cannot open " + path);
  out << "check,measured,threshold,pass\n";
  for (const CheckRow& r : rep.rows)
    out << r.name << "," << r.measured << "," << r.threshold << ","
        << (r.pass ? "1" : "0") << "\n";
}

}  // namespace losline
