// Command-line front end: closed-form LOS probabilities, coverage
// probabilities, the Monte-Carlo simulator, the cross-method validation
// report, and declarative parameter sweeps with CSV/JSON output.
//
// Exit codes: 0 success, 1 usage error, 2 validation failure,
//             3 numerical budget exceeded.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "losline/losline.hpp"

namespace {

using namespace losline;

std::string fmt(double v) { return losline::detail::format_double(v); }

std::vector<double> parse_grid(const std::string& s) {
  // "a:b:step" or a comma-separated list
  const auto c1 = s.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw ConfigError("grid", "expected a:b:step or a comma list");
    const double a = std::stod(s.substr(0, c1));
    const double b = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(s.substr(c2 + 1));
    if (!(step > 0.0)) throw ConfigError("grid", "step must be > 0");
    std::vector<double> grid;
    for (double x = a; x <= b + 1e-9 * step; x += step) grid.push_back(x);
    return grid;
  }
  return losline::detail::parse_list("grid", s);
}

std::vector<RunMethod> parse_methods(const std::string& s) {
  std::vector<RunMethod> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = losline::detail::trim(item);
    if (!item.empty()) out.push_back(parse_method(item));
  }
  if (out.empty()) throw ConfigError("method", "no methods given");
  return out;
}

void print_estimate(const std::string& method, double value,
                    std::optional<double> se) {
  std::cout << method << " " << fmt(value);
  if (se) std::cout << " stderr " << fmt(*se);
  std::cout << "\n";
}

/// One-row CSV for the single-point verbs; same formatting as sweeps so
/// reruns are byte-identical.
void write_single_csv(const std::string& path, const std::string& quantity,
                      const std::vector<std::string>& methods,
                      const std::vector<MethodValue>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("out", "cannot open " + path);
  out << "quantity,method,value,stderr\n";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    out << quantity << "," << methods[i] << "," << fmt(values[i].value) << ",";
    if (values[i].stderr_) out << fmt(*values[i].stderr_);
    out << "\n";
  }
}

struct CommonOpts {
  std::string scenario;
  std::uint64_t seed = 1;
  std::int64_t trials = 100000;
  int workers = 1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario, "scenario file (key = value)")
      ->required();
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--out", o.out, "write results as CSV");
}

int cmd_los(const CommonOpts& o, double tx_x, const std::string& methods_arg) {
  const ScenarioParams params = load_scenario(o.scenario);
  std::vector<std::string> names;
  std::vector<MethodValue> vals;
  for (RunMethod m : parse_methods(methods_arg)) {
    MethodValue v;
    if (m == RunMethod::closed_form) {
      v.value = los_prob_single_multilane(params.lanes);
    } else if (m == RunMethod::simulate) {
      SimConfig cfg{params, o.trials, o.seed};
      cfg.workers = o.workers;
      const SimEstimate e = sim_los_single(cfg, tx_x);
      v.value = e.value;
      v.stderr_ = e.stderr_;
    } else {
      throw ConfigError("method", "los supports closed-form and mc/simulate");
    }
    names.push_back(to_string(m));
    vals.push_back(v);
    print_estimate(names.back(), v.value, v.stderr_);
  }
  if (!o.out.empty()) write_single_csv(o.out, "los-single", names, vals);
  return 0;
}

int cmd_joint(const CommonOpts& o, const std::vector<double>& tx,
              const std::string& methods_arg) {
  const ScenarioParams params = load_scenario(o.scenario);
  if (tx.empty()) throw ConfigError("tx", "need transmitter positions");
  const TransmitterSet txs = TransmitterSet::from_unsorted(tx);
  std::vector<std::string> names;
  std::vector<MethodValue> vals;
  for (RunMethod m : parse_methods(methods_arg)) {
    MethodValue v;
    if (m == RunMethod::closed_form) {
      v.value = los_prob_joint(params, txs);
    } else if (m == RunMethod::simulate) {
      SimConfig cfg{params, o.trials, o.seed};
      cfg.workers = o.workers;
      const SimEstimate e = sim_joint_los(cfg, txs);
      v.value = e.value;
      v.stderr_ = e.stderr_;
    } else {
      throw ConfigError("method", "joint supports closed-form and mc/simulate");
    }
    names.push_back(to_string(m));
    vals.push_back(v);
    print_estimate(names.back(), v.value, v.stderr_);
  }
  if (!o.out.empty()) write_single_csv(o.out, "los-joint", names, vals);
  return 0;
}

int cmd_coverage(const CommonOpts& o, int k, bool at_least_k,
                 const std::string& method_arg, double eps_tail,
                 bool include_empty, int n_cap, int quad_nodes,
                 std::int64_t simplex_samples, const std::string& per_n_path) {
  CoverageQuery q;
  q.params = load_scenario(o.scenario);
  q.k = k;
  q.eps_tail = eps_tail;
  q.include_empty = include_empty;
  q.analytic_n_cap = n_cap;
  q.budget.mc_trials = o.trials;
  q.budget.quad_nodes = quad_nodes;
  q.budget.simplex_samples_per_n = simplex_samples;
  q.workers = o.workers;
  q.seed = o.seed;

  std::vector<std::string> names;
  std::vector<MethodValue> vals;
  for (RunMethod m : parse_methods(method_arg)) {
    if (m == RunMethod::closed_form)
      throw ConfigError("method",
                        "coverage methods: conditional-mc, quadrature, simulate");
    q.method = m == RunMethod::conditional_mc ? CoverageMethod::conditional_mc
               : m == RunMethod::quadrature   ? CoverageMethod::quadrature
                                              : CoverageMethod::simulate;
    const CoverageResult r =
        at_least_k ? k_los_prob(q) : full_coverage_prob(q);
    if (!r.warning.empty()) std::cerr << "warning: " << r.warning << "\n";
    names.push_back(to_string(m));
    vals.push_back(MethodValue{r.estimate.value, r.estimate.stderr_});
    print_estimate(names.back(), r.estimate.value, r.estimate.stderr_);
    if (r.estimate.truncation)
      std::cout << "  truncation n_max " << r.estimate.truncation->n_max
                << " tail " << fmt(r.estimate.truncation->tail) << "\n";
    if (!per_n_path.empty() && !r.per_n.empty()) {
      std::ofstream pn(per_n_path, std::ios::binary | std::ios::trunc);
      if (!pn) throw ConfigError("per-n", "cannot open " + per_n_path);
      pn << "n,contribution\n";
      for (std::size_t n = 0; n < r.per_n.size(); ++n)
        pn << n << "," << fmt(r.per_n[n]) << "\n";
    }
  }
  if (!o.out.empty())
    write_single_csv(o.out, at_least_k ? "coverage-k" : "coverage-full", names,
                     vals);
  return 0;
}

int cmd_simulate(const CommonOpts& o, const std::string& quantity_arg,
                 std::int64_t trials_set, int k, const std::vector<double>& tx,
                 double tx_x, double horizon, double dt, double window_half,
                 double probe_length, bool include_empty,
                 const std::string& dump_path) {
  const Quantity quantity = parse_quantity(quantity_arg);
  SimConfig cfg;
  cfg.params = load_scenario(o.scenario);
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  cfg.n_trials = o.trials;
  if (trials_set == 0 && quantity == Quantity::volume_fraction)
    cfg.n_trials = 200;  // each trial probes a long interval
  cfg.horizon_s = horizon;
  cfg.dt_s = dt;
  cfg.window_half = window_half;
  cfg.probe_length = probe_length;

  SimEstimate e;
  std::string name = to_string(quantity);
  switch (quantity) {
    case Quantity::los_single:
      e = sim_los_single(cfg, tx_x);
      break;
    case Quantity::los_pair:
    case Quantity::los_joint:
      if (tx.empty()) throw ConfigError("tx", "need transmitter positions");
      e = sim_joint_los(cfg, TransmitterSet::from_unsorted(tx));
      break;
    case Quantity::coverage_full:
    case Quantity::coverage_k: {
      std::vector<TrialRecord> rows;
      e = sim_coverage(cfg,
                       quantity == Quantity::coverage_full
                           ? SimCoverageKind::full
                           : SimCoverageKind::at_least_k,
                       k, include_empty, dump_path.empty() ? nullptr : &rows);
      if (!dump_path.empty()) {
        std::ofstream dump(dump_path, std::ios::binary | std::ios::trunc);
        if (!dump) throw ConfigError("dump-trials", "cannot open " + dump_path);
        dump << "trial,n_tx,n_los,covered\n";
        for (const TrialRecord& r : rows)
          dump << r.trial << "," << r.n_tx << "," << r.n_los << ","
               << (r.covered ? "1" : "0") << "\n";
      }
      break;
    }
    case Quantity::volume_fraction:
      e = sim_volume_fraction(cfg);
      break;
    case Quantity::ergodic:
      cfg.mode = SimMode::ergodic;
      e = sim_ergodic_los(cfg, tx_x);
      break;
  }
  print_estimate(name, e.value, e.stderr_);
  if (e.low_counts)
    std::cerr << "warning: fewer than 30 successes or failures; the normal "
                 "stderr approximation is unreliable\n";
  if (!o.out.empty())
    write_single_csv(o.out, name, {"simulate"},
                     {MethodValue{e.value, e.stderr_}});
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  const ScenarioParams params = load_scenario(o.scenario);
  const ValidationReport rep = run_validation(params, o.trials, o.seed);
  for (const CheckRow& r : rep.rows) {
    std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.name << " measured "
              << fmt(r.measured) << " threshold " << fmt(r.threshold);
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
  }
  if (!o.out.empty()) write_report_csv(rep, o.out);
  std::cout << (rep.all_pass() ? "all checks passed" : "some checks FAILED")
            << "\n";
  return rep.all_pass() ? 0 : 2;
}

int cmd_sweep(const CommonOpts& o, const std::string& preset,
              std::string quantity_arg, std::string var_arg,
              std::string grid_arg, std::string methods_arg, int k,
              double tx_x, double pair_x1, std::vector<double> tx,
              double eps_tail, bool include_empty, int n_cap) {
  // Presets fill the experiment shape; the scenario file still supplies the
  // model parameters.
  if (!preset.empty()) {
    if (preset == "pair-separation") {
      quantity_arg = "los-pair";
      var_arg = "pair-separation";
      if (grid_arg.empty()) grid_arg = "0:300:5";
      if (methods_arg.empty()) methods_arg = "closed-form,simulate";
    } else if (preset == "pair-density") {
      quantity_arg = "los-pair";
      var_arg = "lambda-b";
      if (grid_arg.empty()) grid_arg = "0:30:2";
      if (methods_arg.empty()) methods_arg = "closed-form,simulate";
      if (tx.empty()) tx = {0.0, 50.0};  // fixed pair while the density sweeps
    } else if (preset == "coverage-length") {
      quantity_arg = "coverage-full";
      var_arg = "mean-length";
      if (grid_arg.empty()) grid_arg = "1:10:1";
      if (methods_arg.empty()) methods_arg = "conditional-mc,simulate";
    } else {
      throw ConfigError("preset", "unknown preset '" + preset + "'");
    }
  }
  if (quantity_arg.empty() || var_arg.empty() || grid_arg.empty() ||
      methods_arg.empty())
    throw ConfigError("sweep",
                      "need --quantity, --var, --grid and --methods (or a "
                      "--preset)");
  ExperimentSpec spec;
  spec.quantity = parse_quantity(quantity_arg);
  spec.sweep = parse_sweep_var(var_arg);
  spec.grid = parse_grid(grid_arg);
  spec.methods = parse_methods(methods_arg);
  spec.base = load_scenario(o.scenario);
  spec.k = k;
  spec.tx_x = tx_x;
  spec.pair_x1 = pair_x1;
  spec.tx_positions = tx;
  spec.trials = o.trials;
  spec.eps_tail = eps_tail;
  spec.include_empty = include_empty;
  spec.analytic_n_cap = n_cap;
  spec.workers = o.workers;
  spec.seed = o.seed;
  spec.out_csv = o.out;

  const std::vector<ExperimentRow> rows = run_experiment(spec);
  for (const ExperimentRow& row : rows) {
    std::cout << sweep_column(spec.sweep) << " " << fmt(row.sweep_value);
    for (std::size_t i = 0; i < spec.methods.size(); ++i) {
      std::cout << "  " << to_string(spec.methods[i]) << " "
                << fmt(row.by_method[i].value);
      if (row.by_method[i].stderr_)
        std::cout << " +- " << fmt(*row.by_method[i].stderr_);
    }
    std::cout << "\n";
  }
  if (!o.out.empty())
    std::cout << "wrote " << o.out << " and " << o.out << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spatially consistent LOS/blockage model for vehicular networks: "
      "closed-form joint-LOS and coverage probabilities with a Monte-Carlo "
      "oracle"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* los = app.add_subcommand("los", "single-transmitter LOS probability");
  double tx_x = 100.0;
  std::string methods = "closed-form";
  add_common(los, o);
  los->add_option("--tx-x", tx_x, "transmitter x-coordinate (m)");
  los->add_option("--method", methods, "closed-form,mc");

  auto* joint = app.add_subcommand("joint", "joint LOS for fixed transmitters");
  std::vector<double> tx;
  std::string joint_methods = "closed-form";
  add_common(joint, o);
  joint->add_option("--tx", tx, "transmitter x-coordinates (m)")->delimiter(',');
  joint->add_option("--method", joint_methods, "closed-form,mc");

  auto* cov = app.add_subcommand("coverage", "full / at-least-k LOS coverage");
  int k = 1;
  bool at_least_k = false;
  std::string cov_method = "conditional-mc";
  double eps_tail = 1e-8;
  bool include_empty = false;
  int n_cap = 0;
  int quad_nodes = 64;
  std::int64_t simplex_samples = 20000;
  std::string per_n_path;
  add_common(cov, o);
  cov->add_option("--k", k, "at-least-k coverage (default: full)")
      ->check(CLI::PositiveNumber);
  cov->add_flag("--at-least-k", at_least_k,
                "interpret --k as at-least-k coverage");
  cov->add_option("--method", cov_method, "conditional-mc,quadrature,simulate");
  cov->add_option("--eps-tail", eps_tail, "Poisson truncation tolerance");
  cov->add_flag("--include-empty", include_empty,
                "count 'no detectable transmitter' as covered");
  cov->add_option("--n-cap", n_cap, "analytic cap on n for at-least-k");
  cov->add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes (n <= 3)");
  cov->add_option("--simplex-samples", simplex_samples,
                  "sorted-uniform samples per n > 3");
  cov->add_option("--per-n", per_n_path, "write per-n contributions CSV");

  auto* sim = app.add_subcommand("simulate", "direct Monte-Carlo estimates");
  std::string quantity = "coverage-full";
  double horizon = 0.0, dt = 0.0, window_half = 0.0, probe_length = 0.0;
  std::string dump_path;
  std::vector<double> sim_tx;
  double sim_tx_x = 100.0;
  int sim_k = 1;
  bool sim_include_empty = false;
  add_common(sim, o);
  sim->add_option("--quantity", quantity,
                  "los-single|los-joint|coverage-full|coverage-k|volume-"
                  "fraction|ergodic");
  sim->add_option("--k", sim_k, "k for coverage-k");
  sim->add_option("--tx", sim_tx, "transmitter x-coordinates")->delimiter(',');
  sim->add_option("--tx-x", sim_tx_x, "transmitter x (los-single / ergodic)");
  sim->add_option("--horizon", horizon, "ergodic horizon (s)");
  sim->add_option("--dt", dt, "ergodic time step (s)");
  sim->add_option("--window-half", window_half, "obstacle window half-length");
  sim->add_option("--probe-length", probe_length,
                  "volume-fraction probe interval length (m)");
  sim->add_flag("--include-empty", sim_include_empty,
                "count 'no detectable transmitter' as covered");
  sim->add_option("--dump-trials", dump_path, "per-trial CSV dump");

  auto* val = app.add_subcommand("validate", "cross-method invariant report");
  add_common(val, o);

  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV + sidecar");
  std::string preset, sw_quantity, sw_var, sw_grid, sw_methods;
  int sw_k = 2;
  double sw_tx_x = 100.0, sw_pair_x1 = 0.0;
  std::vector<double> sw_tx;
  double sw_eps = 1e-8;
  bool sw_include_empty = false;
  int sw_cap = 0;
  add_common(sweep, o);
  sweep->add_option("--preset", preset,
                    "pair-separation | pair-density | coverage-length");
  sweep->add_option("--quantity", sw_quantity, "quantity to sweep");
  sweep->add_option("--var", sw_var,
                    "pair-separation|lambda-b|mean-length|lambda-t");
  sweep->add_option("--grid", sw_grid, "a:b:step or comma list");
  sweep->add_option("--methods,--method", sw_methods, "comma list of methods");
  sweep->add_option("--k", sw_k, "k for coverage-k");
  sweep->add_option("--tx-x", sw_tx_x, "transmitter x (los-single/ergodic)");
  sweep->add_option("--pair-x1", sw_pair_x1, "anchor transmitter (los-pair)");
  sweep->add_option("--tx", sw_tx, "fixed transmitter positions")->delimiter(',');
  sweep->add_option("--eps-tail", sw_eps, "Poisson truncation tolerance");
  sweep->add_flag("--include-empty", sw_include_empty,
                  "count 'no detectable transmitter' as covered");
  sweep->add_option("--n-cap", sw_cap, "analytic cap on n for at-least-k");

  std::int64_t trials_flag_count = 0;
  try {
    app.parse(argc, argv);
    trials_flag_count = sim->count("--trials");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (los->parsed()) return cmd_los(o, tx_x, methods);
    if (joint->parsed()) return cmd_joint(o, tx, joint_methods);
    if (cov->parsed())
      return cmd_coverage(o, k, at_least_k || cov->count("--k") > 0, cov_method,
                          eps_tail, include_empty, n_cap, quad_nodes,
                          simplex_samples, per_n_path);
    if (sim->parsed())
      return cmd_simulate(o, quantity, trials_flag_count, sim_k, sim_tx,
                          sim_tx_x, horizon, dt, window_half, probe_length,
                          sim_include_empty, dump_path);
    if (val->parsed()) return cmd_validate(o);
    if (sweep->parsed())
      return cmd_sweep(o, preset, sw_quantity, sw_var, sw_grid, sw_methods,
                       sw_k, sw_tx_x, sw_pair_x1, sw_tx, sw_eps,
                       sw_include_empty, sw_cap);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NoDetectableRegion& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
