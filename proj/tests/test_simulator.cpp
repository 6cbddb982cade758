#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "losline/analytic_los.hpp"
#include "losline/simulator.hpp"

using namespace losline;

namespace {

ScenarioParams standard_params() {
  ScenarioParams p;
  p.lambda_t = 4e-3;
  p.lanes = {Lane{0.02, 0.4, 10.0}};
  p.d1 = 10.0;
  p.d2 = 10.0;
  p.radio = radio_from_d_star(500.0);
  return p;
}

constexpr double kP1 = 0.9048374180359596;  // e^{-0.1}

}  // namespace

TEST_CASE("single-transmitter simulation matches the closed form") {
  SimConfig cfg{standard_params(), 100000, 424242};
  const SimEstimate e = sim_los_single(cfg, 150.0);
  CHECK(std::abs(e.value - kP1) <= 3.0 * e.stderr_);
  CHECK(e.n_trials == 100000);

  SECTION("obstacle-free road is always LOS") {
    SimConfig free = cfg;
    free.params.lanes[0].lambda_b = 0.0;
    const SimEstimate f = sim_los_single(free, 150.0);
    CHECK(f.value == 1.0);
    CHECK(f.stderr_ == 0.0);
  }
  SECTION("the LOS probability does not depend on the transmitter position") {
    SimConfig far = cfg;
    far.seed = 515151;
    const SimEstimate g = sim_los_single(far, -3200.0);
    CHECK(std::abs(g.value - e.value) <=
          3.0 * std::sqrt(g.stderr_ * g.stderr_ + e.stderr_ * e.stderr_));
  }
}

TEST_CASE("two lanes superpose") {
  ScenarioParams p = standard_params();
  p.lanes = {Lane{0.01, 0.4, 5.0}, Lane{0.01, 0.4, 10.0}};
  SimConfig cfg{p, 100000, 99};
  const SimEstimate e = sim_los_single(cfg, 150.0);
  // exp(-sum 2 lb/mu) = e^{-0.1} again
  CHECK(std::abs(e.value - kP1) <= 3.0 * e.stderr_);

  SECTION("different heights, same product") {
    p.lanes = {Lane{0.01, 0.4, 3.0}, Lane{0.01, 0.4, 16.0}};
    SimConfig cfg2{p, 100000, 100};
    const SimEstimate e2 = sim_los_single(cfg2, 150.0);
    CHECK(std::abs(e2.value - kP1) <= 3.0 * e2.stderr_);
  }
}

TEST_CASE("joint simulation matches the closed forms") {
  const ScenarioParams p = standard_params();
  SECTION("frozen pair value") {
    SimConfig cfg{p, 100000, 7001};
    const SimEstimate e = sim_joint_los(cfg, TransmitterSet::from_unsorted({0.0, 10.0}));
    CHECK(std::abs(e.value - 0.8411940206041810) <= 3.0 * e.stderr_);
  }
  SECTION("frozen three-transmitter value") {
    SimConfig cfg{p, 100000, 7002};
    const SimEstimate e =
        sim_joint_los(cfg, TransmitterSet::from_unsorted({0.0, 10.0, 30.0}));
    CHECK(std::abs(e.value - 0.7653375874694186) <= 3.0 * e.stderr_);
  }
  SECTION("coincident pair behaves like a single transmitter") {
    SimConfig cfg{p, 100000, 7003};
    const SimEstimate e =
        sim_joint_los(cfg, TransmitterSet::from_unsorted({40.0, 40.0}));
    CHECK(std::abs(e.value - kP1) <= 3.0 * e.stderr_);
  }
  SECTION("widely separated pair decorrelates to e^{-4 lb/mu}") {
    SimConfig cfg{p, 100000, 7004};
    const SimEstimate e =
        sim_joint_los(cfg, TransmitterSet::from_unsorted({0.0, 2000.0}));
    CHECK(std::abs(e.value - 0.8187307530779819) <= 3.0 * e.stderr_);
  }
}

TEST_CASE("coverage simulation") {
  SECTION("obstacle-free: P(N >= 1)") {
    ScenarioParams p = standard_params();
    p.lanes[0].lambda_b = 0.0;
    const double mean =
        p.lambda_t * window_length(detect_radius(p.radio), p.d1, p.d2);
    SimConfig cfg{p, 50000, 31};
    const SimEstimate e = sim_coverage(cfg, SimCoverageKind::full);
    CHECK(std::abs(e.value - (1.0 - std::exp(-mean))) <= 3.0 * e.stderr_);
  }
  SECTION("k far beyond the Poisson mean is never reached") {
    SimConfig cfg{standard_params(), 20000, 32};
    const SimEstimate e =
        sim_coverage(cfg, SimCoverageKind::at_least_k, 200);
    CHECK(e.value == 0.0);
  }
  SECTION("enlarging the window does not shift the estimate") {
    SimConfig a{standard_params(), 50000, 33};
    SimConfig b = a;
    b.seed = 34;
    b.window_half = 1200.0;  // well beyond xi/2 ~ 500
    const SimEstimate ea = sim_coverage(a, SimCoverageKind::full);
    const SimEstimate eb = sim_coverage(b, SimCoverageKind::full);
    CHECK(std::abs(ea.value - eb.value) <=
          3.0 * std::sqrt(ea.stderr_ * ea.stderr_ + eb.stderr_ * eb.stderr_));
  }
  SECTION("window below xi/2 is rejected") {
    SimConfig cfg{standard_params(), 100, 35};
    cfg.window_half = 100.0;
    CHECK_THROWS_AS(sim_coverage(cfg, SimCoverageKind::full), ConfigError);
  }
  SECTION("trial dump rows are complete and ordered") {
    SimConfig cfg{standard_params(), 500, 36};
    std::vector<TrialRecord> rows;
    const SimEstimate e =
        sim_coverage(cfg, SimCoverageKind::full, 1, false, &rows);
    REQUIRE(rows.size() == 500);
    std::int64_t covered = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].trial == std::int64_t(i));
      CHECK(rows[i].n_los <= rows[i].n_tx);
      covered += rows[i].covered ? 1 : 0;
    }
    CHECK(double(covered) / 500.0 == Catch::Approx(e.value));
  }
}

TEST_CASE("simulation estimates are reproducible and worker-invariant") {
  SimConfig cfg{standard_params(), 20000, 777};
  const SimEstimate a = sim_coverage(cfg, SimCoverageKind::full);
  const SimEstimate b = sim_coverage(cfg, SimCoverageKind::full);
  CHECK(a.value == b.value);
  // Bernoulli successes are integers: any worker count gives the same sum.
  SimConfig cfg4 = cfg;
  cfg4.workers = 4;
  const SimEstimate c = sim_coverage(cfg4, SimCoverageKind::full);
  CHECK(c.value == a.value);
}

TEST_CASE("volume fraction of the Boolean model") {
  ScenarioParams p = standard_params();
  SimConfig cfg{p, 200, 808};
  const SimEstimate e = sim_volume_fraction(cfg);
  CHECK(std::abs(e.value - 0.09516258196404043) <= 3.0 * e.stderr_);

  SECTION("no obstacles, no coverage") {
    SimConfig zero = cfg;
    zero.params.lanes[0].lambda_b = 0.0;
    CHECK(sim_volume_fraction(zero).value == 0.0);
  }
  SECTION("point obstacles cover almost nothing") {
    SimConfig tiny = cfg;
    tiny.params.lanes[0].mu = 500.0;  // mean full length 4 mm
    tiny.n_trials = 50;
    CHECK(sim_volume_fraction(tiny).value < 1e-3);
  }
}

TEST_CASE("ergodic time averages converge to the snapshot probability") {
  ScenarioParams p = standard_params();
  SECTION("moving receiver, static obstacles") {
    p.v = 10.0;
    p.v_o = 0.0;
    SimConfig cfg{p, 1, 4040};
    cfg.mode = SimMode::ergodic;
    const SimEstimate e = sim_ergodic_los(cfg, 150.0);
    CHECK(e.mode == SimMode::ergodic);
    CHECK(std::abs(e.value - kP1) <= 3.0 * e.stderr_);
  }
  SECTION("static receiver, drifting obstacles") {
    p.v = 0.0;
    p.v_o = 10.0;
    SimConfig cfg{p, 1, 4041};
    cfg.mode = SimMode::ergodic;
    const SimEstimate e = sim_ergodic_los(cfg, 150.0);
    CHECK(std::abs(e.value - kP1) <= 3.0 * e.stderr_);
  }
  SECTION("no motion, no mixing: rejected") {
    p.v = 0.0;
    p.v_o = 0.0;
    SimConfig cfg{p, 1, 4042};
    cfg.mode = SimMode::ergodic;
    CHECK_THROWS_AS(sim_ergodic_los(cfg, 150.0), ConfigError);
  }
}

TEST_CASE("3-sigma intervals cover the truth at the nominal rate") {
  // Calibration meta-test: across 1000 independent estimates of the
  // single-transmitter LOS probability, the 99.7% interval should cover the
  // closed form in at least 99% of runs.
  const ScenarioParams p = standard_params();
  int covered = 0;
  const int runs = 1000;
  for (int r = 0; r < runs; ++r) {
    SimConfig cfg{p, 1000, substream_seed(606060, std::uint64_t(r))};
    const SimEstimate e = sim_los_single(cfg, 120.0);
    if (std::abs(e.value - kP1) <= 3.0 * e.stderr_) ++covered;
  }
  CHECK(covered >= 990);
}

TEST_CASE("low-count flag warns about the normal approximation") {
  ScenarioParams p = standard_params();
  p.lanes[0].lambda_b = 2e-4;  // p extremely close to 1
  SimConfig cfg{p, 2000, 11};
  const SimEstimate e = sim_los_single(cfg, 120.0);
  CHECK(e.low_counts);
}
