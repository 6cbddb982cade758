// Acceptance suite: every criterion prints one [PASS]/[FAIL] line; the exit
// code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "losline/losline.hpp"

using namespace losline;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20260809;
int failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

ScenarioParams base_params(double lambda_b_per_m, double mu, double d_star) {
  ScenarioParams p;
  p.lambda_t = 4e-3;
  p.lanes = {Lane{lambda_b_per_m, mu, 10.0}};
  p.d1 = 10.0;
  p.d2 = 10.0;
  p.radio = radio_from_d_star(d_star);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. Single-transmitter closed form vs MC over 20 random parameter draws.
void criterion_1() {
  Timer timer;
  RandomStream rng(substream_seed(kSeed, 1));
  int hits = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double lambda_b = rng.uniform(1.0, 30.0) / 1000.0;
    const double mu = 1.0 / rng.uniform(1.0, 10.0);
    const double closed = los_prob_single(lambda_b, mu);
    ScenarioParams p = base_params(lambda_b, mu, 1500.0);
    SimConfig cfg{p, 100000, substream_seed(kSeed, 100 + std::uint64_t(i))};
    const SimEstimate e = sim_los_single(cfg, 120.0);
    const double z = std::abs(e.value - closed) / e.stderr_;
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++hits;
  }
  const double secs = timer.seconds();
  report(1, hits >= 19 && secs <= 60.0,
         "single-transmitter LOS closed form vs MC (20 draws, 1e5 trials)",
         std::to_string(hits) + "/20 within 3 sigma, worst z " +
             std::to_string(worst_z) + ", " + std::to_string(secs) + " s");
}

// 2. Joint LOS (n = 2..6) closed form vs MC, plus the coincident-collapse
//    identity at machine precision.
void criterion_2() {
  RandomStream rng(substream_seed(kSeed, 2));
  int hits = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double lambda_b = rng.uniform(1.0, 30.0) / 1000.0;
    const double mu = 1.0 / rng.uniform(1.0, 10.0);
    const int n = 2 + i % 5;
    std::vector<double> xs;
    for (int j = 0; j < n; ++j) xs.push_back(rng.uniform(-200.0, 200.0));
    ScenarioParams p = base_params(lambda_b, mu, 1500.0);
    const TransmitterSet txs = TransmitterSet::from_unsorted(xs);
    const double closed = los_prob_joint(p, txs);
    SimConfig cfg{p, 100000, substream_seed(kSeed, 200 + std::uint64_t(i))};
    const SimEstimate e = sim_joint_los(cfg, txs);
    const double z = std::abs(e.value - closed) / e.stderr_;
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++hits;
  }
  double worst_collapse = 0.0;
  for (int n = 2; n <= 8; ++n) {
    ScenarioParams p = base_params(0.02, 0.4, 1500.0);
    const TransmitterSet txs{std::vector<double>(std::size_t(n), 57.0)};
    worst_collapse = std::max(
        worst_collapse,
        std::abs(los_prob_joint(p, txs) - los_prob_single(0.02, 0.4)));
  }
  report(2, hits >= 19 && worst_collapse <= 5e-15,
         "joint LOS (n = 2..6) closed form vs MC + coincident collapse",
         std::to_string(hits) + "/20 within 3 sigma, worst z " +
             std::to_string(worst_z) + ", collapse residual " +
             std::to_string(worst_collapse));
}

// 3. Pair-separation curve shape: starts at the single value, monotone
//    nonincreasing, flattens to e^{-4 lb/mu}.
void criterion_3() {
  const ScenarioParams p = base_params(0.02, 0.4, 1500.0);
  const double single = los_prob_single(0.02, 0.4);
  const double at_zero = los_prob_pair(p, 0.0, 0.0);
  bool monotone = true;
  double prev = at_zero;
  for (double d = 5.0; d <= 300.0; d += 5.0) {
    const double v = los_prob_pair(p, 0.0, d);
    if (v > prev + 1e-15) monotone = false;
    prev = v;
  }
  const double at_300 = los_prob_pair(p, 0.0, 300.0);
  const double indep = std::exp(-4.0 * 0.02 / 0.4);
  const bool pass = std::abs(at_zero - single) <= 5e-15 && monotone &&
                    std::abs(at_300 - indep) <= 1e-4;
  report(3, pass, "pair-LOS curve: single value at d=0, monotone, flat tail",
         "d=0 residual " + std::to_string(std::abs(at_zero - single)) +
             ", tail residual " + std::to_string(std::abs(at_300 - indep)));
}

// 4. Full-coverage triple agreement (conditional-mc, quadrature, simulation)
//    over lambda_b in {6,10,14}/km and mean obstacle length 1..10 m.
void criterion_4() {
  Timer timer;
  int comparisons = 0, agreements = 0;
  bool monotone = true;
  double worst_z = 0.0;
  for (double lb_km : {6.0, 10.0, 14.0}) {
    double prev_mc = 2.0, prev_quad = 2.0, prev_sim = 2.0;
    double prev_se_mc = 0.0, prev_se_sim = 0.0;
    for (double len = 1.0; len <= 10.0; len += 1.0) {
      ScenarioParams p = base_params(lb_km / 1000.0, 2.0 / len, 1500.0);
      CoverageQuery q;
      q.params = p;
      q.budget.mc_trials = 100000;
      q.budget.simplex_samples_per_n = 20000;
      q.seed = substream_seed(kSeed, 400 + std::uint64_t(lb_km * 10 + len));
      q.method = CoverageMethod::conditional_mc;
      const CoverageResult mc = full_coverage_prob(q);
      q.method = CoverageMethod::quadrature;
      const CoverageResult quad = full_coverage_prob(q);
      q.method = CoverageMethod::simulate;
      const CoverageResult sim = full_coverage_prob(q);

      const double se_mc = mc.estimate.stderr_.value_or(0.0);
      const double se_quad = quad.estimate.stderr_.value_or(0.0);
      const double se_sim = sim.estimate.stderr_.value_or(0.0);
      auto check_pair = [&](double a, double b, double se, double extra) {
        ++comparisons;
        worst_z = std::max(worst_z, std::abs(a - b) / (se + extra));
        if (std::abs(a - b) <= 3.0 * se + extra) ++agreements;
      };
      check_pair(mc.estimate.value, quad.estimate.value,
                 std::sqrt(se_mc * se_mc + se_quad * se_quad), 1e-8);
      check_pair(mc.estimate.value, sim.estimate.value,
                 std::sqrt(se_mc * se_mc + se_sim * se_sim), 0.0);
      check_pair(quad.estimate.value, sim.estimate.value,
                 std::sqrt(se_quad * se_quad + se_sim * se_sim), 1e-8);

      // monotone nonincreasing in the mean obstacle length, up to noise
      if (mc.estimate.value >
          prev_mc + 3.0 * std::sqrt(se_mc * se_mc + prev_se_mc * prev_se_mc))
        monotone = false;
      if (quad.estimate.value > prev_quad + 3.0 * (se_quad + 1e-8))
        monotone = false;
      if (sim.estimate.value >
          prev_sim + 3.0 * std::sqrt(se_sim * se_sim + prev_se_sim * prev_se_sim))
        monotone = false;
      prev_mc = mc.estimate.value;
      prev_quad = quad.estimate.value;
      prev_sim = sim.estimate.value;
      prev_se_mc = se_mc;
      prev_se_sim = se_sim;
    }
  }

  // Cross-check the deterministic n <= 3 quadrature terms against an
  // independent sorted-uniform estimate at one operating point.
  bool per_n_ok = true;
  {
    ScenarioParams p = base_params(10.0 / 1000.0, 2.0 / 5.0, 1500.0);
    CoverageQuery q;
    q.params = p;
    q.method = CoverageMethod::quadrature;
    q.seed = substream_seed(kSeed, 480);
    const CoverageResult quad = full_coverage_prob(q);
    const double xi = window_length(1500.0, 10.0, 10.0);
    const double a = xi * (10.0 / 20.0) / 2.0;
    const TruncatedPoisson tp = truncate_poisson(p.lambda_t * xi, q.eps_tail);
    RandomStream rng(substream_seed(kSeed, 481));
    for (int n = 1; n <= 3; ++n) {
      const std::int64_t m = 200000;
      double s = 0.0, s2 = 0.0;
      std::vector<double> u(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < m; ++i) {
        for (double& x : u) x = rng.uniform(-a, a);
        std::sort(u.begin(), u.end());
        const double v = los_prob_joint_projected(0.01, 0.4, u);
        s += v;
        s2 += v * v;
      }
      const double mean = s / double(m);
      const double se =
          std::sqrt(std::max(0.0, (s2 - s * s / double(m)) / double(m - 1)) /
                    double(m));
      const double term = tp.pmf[std::size_t(n)] * mean;
      const double got = quad.per_n[std::size_t(n)];
      // the n = 1 integrand is constant, so its sampled stderr is exactly 0
      if (std::abs(got - term) > 3.0 * tp.pmf[std::size_t(n)] * se + 1e-12)
        per_n_ok = false;
    }
  }

  const double secs = timer.seconds();
  const bool pass =
      comparisons == agreements && monotone && per_n_ok && secs <= 600.0;
  report(4, pass,
         "full-coverage triple agreement + monotone curves (30 grid cells)",
         std::to_string(agreements) + "/" + std::to_string(comparisons) +
             " pairwise within 3 sigma, worst z " + std::to_string(worst_z) +
             (monotone ? ", monotone" : ", NOT monotone") +
             (per_n_ok ? ", n<=3 terms cross-checked" : ", n<=3 terms OFF") +
             ", " + std::to_string(secs) + " s");
}

// 5. at-least-k coverage: inclusion-exclusion vs simulation, Bonferroni
//    bracketing, and the full <= k=2 <= k=1 ordering on every grid point.
void criterion_5() {
  bool agree = true, order_ok = true, bonferroni_ok = true;
  double worst_z = 0.0;

  for (int k : {1, 2}) {
    ScenarioParams p = base_params(0.02, 0.4, 500.0);  // lambda_t*xi ~ 4
    CoverageQuery q;
    q.params = p;
    q.k = k;
    q.analytic_n_cap = 64;
    q.budget.mc_trials = 100000;
    q.budget.simplex_samples_per_n = 20000;
    q.seed = substream_seed(kSeed, 500 + std::uint64_t(k));
    q.method = CoverageMethod::conditional_mc;
    const CoverageResult mc = k_los_prob(q);
    q.method = CoverageMethod::quadrature;
    const CoverageResult quad = k_los_prob(q);
    q.method = CoverageMethod::simulate;
    const CoverageResult sim = k_los_prob(q);
    const double se_mc = mc.estimate.stderr_.value_or(0.0);
    const double se_quad = quad.estimate.stderr_.value_or(0.0);
    const double se_sim = sim.estimate.stderr_.value_or(0.0);
    const double z1 = std::abs(mc.estimate.value - sim.estimate.value) /
                      std::sqrt(se_mc * se_mc + se_sim * se_sim);
    const double z2 = std::abs(quad.estimate.value - sim.estimate.value) /
                      (std::sqrt(se_quad * se_quad + se_sim * se_sim) + 1e-8);
    worst_z = std::max({worst_z, z1, z2});
    if (z1 > 3.0 || z2 > 3.0) agree = false;
  }

  // Ordering full <= k=2 <= k=1 across the dense-transmitter operating grid
  // (mean ~ 12 detectable transmitters, so the n <= 1 mass where "all LOS"
  // can outrun "at least 2 LOS" is ~8e-5 and the containment margin wins).
  // With fewer transmitters the ordering genuinely inverts: at n = 1, full
  // coverage holds while 2-LOS cannot.
  for (double lb_km : {6.0, 14.0}) {
    for (double len : {1.0, 2.5, 5.0, 7.5, 10.0}) {
      ScenarioParams p = base_params(lb_km / 1000.0, 2.0 / len, 1500.0);
      CoverageQuery q;
      q.params = p;
      q.analytic_n_cap = 64;
      q.budget.mc_trials = 30000;
      q.seed = substream_seed(kSeed, 520);
      q.method = CoverageMethod::conditional_mc;
      const double vf = full_coverage_prob(q).estimate.value;
      q.k = 2;
      const double v2 = k_los_prob(q).estimate.value;
      q.k = 1;
      const double v1 = k_los_prob(q).estimate.value;
      if (!(vf <= v2 + 1e-12 && v2 <= v1 + 1e-12)) order_ok = false;
    }
  }

  // Bonferroni partial sums bracket the converged value (fixed layouts)
  RandomStream rng(substream_seed(kSeed, 530));
  for (int round = 0; round < 50; ++round) {
    const double lambda_b = rng.uniform(0.005, 0.03);
    const double mu = 1.0 / rng.uniform(1.0, 6.0);
    const int n = 3 + int(rng.bits() % 6);
    std::vector<double> xhat;
    double x = 0.0;
    for (int i = 0; i < n; ++i) {
      xhat.push_back(x);
      x += rng.exponential(mu / 2.0);
    }
    for (int k = 1; k <= std::min(3, n); ++k) {
      std::vector<double> partials;
      const double v = at_least_k_los_given_projections(lambda_b, mu, xhat, k,
                                                        64, &partials);
      for (std::size_t j = 0; j < partials.size(); ++j) {
        const bool upper = j % 2 == 0;
        if (upper && partials[j] < v - 1e-12) bonferroni_ok = false;
        if (!upper && partials[j] > v + 1e-12) bonferroni_ok = false;
      }
    }
  }

  report(5, agree && order_ok && bonferroni_ok,
         "at-least-k: inclusion-exclusion vs simulation, Bonferroni brackets, "
         "ordering",
         std::string("worst z ") + std::to_string(worst_z) +
             (order_ok ? ", ordered" : ", ORDER VIOLATION") +
             (bonferroni_ok ? ", bracketed" : ", BRACKET VIOLATION"));
}

// 6. Volume fraction of the Boolean model at three parameter sets.
void criterion_6() {
  bool pass = true;
  double worst_z = 0.0;
  int idx = 0;
  for (auto [lb, mu] : std::vector<std::pair<double, double>>{
           {0.02, 0.4}, {0.006, 0.2}, {0.014, 2.0}}) {
    ScenarioParams p = base_params(lb, mu, 1500.0);
    SimConfig cfg{p, 200, substream_seed(kSeed, 600 + std::uint64_t(idx++))};
    const SimEstimate e = sim_volume_fraction(cfg);
    const double expected = 1.0 - std::exp(-2.0 * lb / mu);
    const double z = std::abs(e.value - expected) / e.stderr_;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) pass = false;
  }
  report(6, pass, "Boolean-model volume fraction vs 1 - e^{-2 lb/mu} (3 sets)",
         "worst z " + std::to_string(worst_z));
}

// 7. Two-lane superposition at two lane-height configurations.
void criterion_7() {
  bool pass = true;
  double worst_z = 0.0;
  int idx = 0;
  for (auto heights : std::vector<std::pair<double, double>>{{5.0, 10.0},
                                                             {3.0, 16.0}}) {
    ScenarioParams p = base_params(0.01, 0.4, 1500.0);
    p.lanes = {Lane{0.01, 0.4, heights.first}, Lane{0.01, 0.4, heights.second}};
    const double expected = los_prob_single_multilane(p.lanes);  // e^{-0.1}
    SimConfig cfg{p, 100000, substream_seed(kSeed, 700 + std::uint64_t(idx++))};
    const SimEstimate e = sim_los_single(cfg, 150.0);
    const double z = std::abs(e.value - expected) / e.stderr_;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) pass = false;
  }
  report(7, pass, "two-lane superposition closed form vs MC (2 height configs)",
         "worst z " + std::to_string(worst_z));
}

// 8. Ergodicity: moving-receiver time average vs the snapshot probability.
void criterion_8() {
  ScenarioParams p = base_params(0.02, 0.4, 1500.0);
  p.v = 10.0;
  p.v_o = 0.0;
  SimConfig cfg{p, 1, substream_seed(kSeed, 800)};
  cfg.mode = SimMode::ergodic;
  cfg.horizon_s = 1e4 / (p.lanes[0].mu * p.v);  // v*T = 1e4 / mu
  const SimEstimate e = sim_ergodic_los(cfg, 150.0);
  const double expected = los_prob_single(0.02, 0.4);
  const double z = std::abs(e.value - expected) / e.stderr_;
  report(8, z <= 3.0,
         "ergodic time average (v = 10 m/s, vT = 1e4/mu) vs closed form",
         "z " + std::to_string(z) + " with batch-means stderr " +
             std::to_string(e.stderr_));
}

// 9. CLI determinism: identical seed and worker count give byte-identical CSV.
void criterion_9() {
  const fs::path dir = fs::temp_directory_path() / "losline_acceptance";
  fs::create_directories(dir);
  const std::string cli = LOSLINE_CLI_PATH;
  const std::string scenario =
      (fs::path(LOSLINE_SCENARIOS_DIR) / "default.cfg").string();
  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  const fs::path a = dir / "sweep.csv";
  const std::string sweep_args =
      "sweep --scenario " + scenario +
      " --quantity coverage-full --var mean-length --grid 2:6:2"
      " --methods conditional-mc,simulate --trials 4000 --seed 11 --workers 2"
      " --out " + a.string();
  bool ok = run(sweep_args);
  const std::string csv1 = slurp(a);
  const std::string json1 = slurp(a.string() + ".json");
  ok = ok && run(sweep_args);
  ok = ok && !csv1.empty() && slurp(a) == csv1;
  ok = ok && slurp(a.string() + ".json") == json1;

  const fs::path c = dir / "cov.csv";
  const std::string cov_args = "coverage --scenario " + scenario +
                               " --method conditional-mc --trials 4000"
                               " --seed 12 --out " + c.string();
  ok = ok && run(cov_args);
  const std::string cov1 = slurp(c);
  ok = ok && run(cov_args);
  ok = ok && !cov1.empty() && slurp(c) == cov1;
  report(9, ok, "CLI reruns with identical seed/workers are byte-identical",
         "sweep + coverage CSV and sidecar compared");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (failures == 0)
    std::printf("acceptance: all 9 criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
