#pragma once

#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "losline/analytic_los.hpp"
#include "losline/coverage.hpp"
#include "losline/errors.hpp"
#include "losline/estimate.hpp"
#include "losline/parallel.hpp"
#include "losline/params.hpp"
#include "losline/simulator.hpp"

namespace losline {

enum class Quantity {
  los_single,
  los_pair,
  los_joint,
  coverage_full,
  coverage_k,
  volume_fraction,
  ergodic
};

enum class SweepVar { pair_separation, lambda_b, mean_length, lambda_t };

/// Methods an experiment can run; conditional-mc/quadrature apply to the
/// coverage quantities, simulate to everything stochastic.
enum class RunMethod { closed_form, quadrature, conditional_mc, simulate };

inline std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::los_single: return "los-single";
    case Quantity::los_pair: return "los-pair";
    case Quantity::los_joint: return "los-joint";
    case Quantity::coverage_full: return "coverage-full";
    case Quantity::coverage_k: return "coverage-k";
    case Quantity::volume_fraction: return "volume-fraction";
    case Quantity::ergodic: return "ergodic";
  }
  return "?";
}

inline Quantity parse_quantity(const std::string& s) {
  for (Quantity q : {Quantity::los_single, Quantity::los_pair,
                     Quantity::los_joint, Quantity::coverage_full,
                     Quantity::coverage_k, Quantity::volume_fraction,
                     Quantity::ergodic})
    if (s == to_string(q)) return q;
  throw ConfigError("quantity", "unknown quantity '" + s + "'");
}

inline std::string to_string(SweepVar v) {
  switch (v) {
    case SweepVar::pair_separation: return "pair-separation";
    case SweepVar::lambda_b: return "lambda-b";
    case SweepVar::mean_length: return "mean-length";
    case SweepVar::lambda_t: return "lambda-t";
  }
  return "?";
}

inline SweepVar parse_sweep_var(const std::string& s) {
  for (SweepVar v : {SweepVar::pair_separation, SweepVar::lambda_b,
                     SweepVar::mean_length, SweepVar::lambda_t})
    if (s == to_string(v)) return v;
  throw ConfigError("var", "unknown sweep variable '" + s + "'");
}

/// CSV column header for a sweep variable (carries the unit).
inline std::string sweep_column(SweepVar v) {
  switch (v) {
    case SweepVar::pair_separation: return "pair_separation_m";
    case SweepVar::lambda_b: return "lambda_b_per_km";
    case SweepVar::mean_length: return "mean_length_m";
    case SweepVar::lambda_t: return "lambda_t_per_km";
  }
  return "?";
}

inline std::string to_string(RunMethod m) {
  switch (m) {
    case RunMethod::closed_form: return "closed-form";
    case RunMethod::quadrature: return "quadrature";
    case RunMethod::conditional_mc: return "conditional-mc";
    case RunMethod::simulate: return "simulate";
  }
  return "?";
}

inline RunMethod parse_method(const std::string& s) {
  if (s == "mc") return RunMethod::simulate;  // alias
  for (RunMethod m : {RunMethod::closed_form, RunMethod::quadrature,
                      RunMethod::conditional_mc, RunMethod::simulate})
    if (s == to_string(m)) return m;
  throw ConfigError("method", "unknown method '" + s + "'");
}

inline bool method_is_stochastic(RunMethod m) {
  return m == RunMethod::conditional_mc || m == RunMethod::simulate;
}

struct ExperimentSpec {
  Quantity quantity = Quantity::los_single;
  SweepVar sweep = SweepVar::lambda_b;
  std::vector<double> grid;
  std::vector<RunMethod> methods;
  ScenarioParams base;
  int k = 2;                          // coverage-k
  double tx_x = 0.0;                  // los-single / ergodic
  double pair_x1 = 0.0;               // los-pair anchor transmitter
  std::vector<double> tx_positions;   // los-joint (also los-pair off-sweep)
  CoverageBudget budget;
  std::int64_t trials = 100000;       // simulate trials
  double eps_tail = 1e-8;
  bool include_empty = false;
  int analytic_n_cap = 0;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out_csv;  // empty = no files; sidecar lands at out_csv + ".json"

  void validate() const {
    base.validate();
    if (grid.empty()) throw ConfigError("grid", "sweep grid must be nonempty");
    if (methods.empty()) throw ConfigError("method", "need at least one method");
    if (trials < 1) throw ConfigError("trials", "trials must be >= 1");
  }
};

struct MethodValue {
  double value = 0.0;
  std::optional<double> stderr_ = std::nullopt;
};

struct ExperimentRow {
  double sweep_value = 0.0;
  std::vector<MethodValue> by_method;  // matches spec.methods order
};

namespace detail {

/// Shortest round-trip decimal form; locale-free and bit-stable, so reruns
/// produce byte-identical CSV.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline ScenarioParams apply_sweep(const ExperimentSpec& spec, double value) {
  ScenarioParams p = spec.base;
  switch (spec.sweep) {
    case SweepVar::pair_separation:
      break;  // handled via transmitter positions
    case SweepVar::lambda_b:
      if (p.lanes.size() != 1)
        throw ConfigError("var", "lambda-b sweep requires a single lane");
      p.lanes[0].lambda_b = value / 1000.0;
      break;
    case SweepVar::mean_length:
      // grid value is the mean full obstacle length 2/mu, in meters
      if (p.lanes.size() != 1)
        throw ConfigError("var", "mean-length sweep requires a single lane");
      if (!(value > 0.0)) throw ConfigError("grid", "mean length must be > 0");
      p.lanes[0].mu = 2.0 / value;
      break;
    case SweepVar::lambda_t:
      p.lambda_t = value / 1000.0;
      break;
  }
  return p;
}

inline ConfigError method_mismatch(Quantity q, RunMethod m) {
  return ConfigError("method", "method '" + to_string(m) +
                                   "' does not apply to quantity '" +
                                   to_string(q) + "'");
}

inline MethodValue evaluate_cell(const ExperimentSpec& spec,
                                 const ScenarioParams& params, double sweep_value,
                                 RunMethod method) {
  MethodValue out;
  auto sim_config = [&] {
    SimConfig cfg;
    cfg.params = params;
    cfg.n_trials = spec.trials;
    cfg.seed = spec.seed;
    cfg.workers = spec.workers;
    return cfg;
  };
  auto coverage_query = [&](CoverageMethod m) {
    CoverageQuery q;
    q.params = params;
    q.k = spec.k;
    q.method = m;
    q.budget = spec.budget;
    q.budget.mc_trials = spec.trials;
    q.eps_tail = spec.eps_tail;
    q.include_empty = spec.include_empty;
    q.analytic_n_cap = spec.analytic_n_cap;
    q.workers = spec.workers;
    q.seed = spec.seed;
    return q;
  };
  auto pair_positions = [&]() -> std::vector<double> {
    if (spec.sweep == SweepVar::pair_separation)
      return {spec.pair_x1, spec.pair_x1 + sweep_value};
    if (spec.tx_positions.size() == 2) return spec.tx_positions;
    throw ConfigError("tx", "los-pair needs two transmitter positions");
  };

  switch (spec.quantity) {
    case Quantity::los_single:
      if (method == RunMethod::closed_form) {
        out.value = los_prob_single_multilane(params.lanes);
      } else if (method == RunMethod::simulate) {
        const SimEstimate e = sim_los_single(sim_config(), spec.tx_x);
        out.value = e.value;
        out.stderr_ = e.stderr_;
      } else {
        throw method_mismatch(spec.quantity, method);
      }
      break;
    case Quantity::los_pair:
    case Quantity::los_joint: {
      std::vector<double> xs = spec.quantity == Quantity::los_pair
                                   ? pair_positions()
                                   : spec.tx_positions;
      if (xs.empty())
        throw ConfigError("tx", "los-joint needs transmitter positions");
      const TransmitterSet txs = TransmitterSet::from_unsorted(std::move(xs));
      if (method == RunMethod::closed_form) {
        out.value = los_prob_joint(params, txs);
      } else if (method == RunMethod::simulate) {
        const SimEstimate e = sim_joint_los(sim_config(), txs);
        out.value = e.value;
        out.stderr_ = e.stderr_;
      } else {
        throw method_mismatch(spec.quantity, method);
      }
      break;
    }
    case Quantity::coverage_full:
    case Quantity::coverage_k: {
      CoverageMethod cm;
      if (method == RunMethod::conditional_mc) cm = CoverageMethod::conditional_mc;
      else if (method == RunMethod::quadrature) cm = CoverageMethod::quadrature;
      else if (method == RunMethod::simulate) cm = CoverageMethod::simulate;
      else throw method_mismatch(spec.quantity, method);
      const CoverageResult r = spec.quantity == Quantity::coverage_full
                                   ? full_coverage_prob(coverage_query(cm))
                                   : k_los_prob(coverage_query(cm));
      out.value = r.estimate.value;
      out.stderr_ = r.estimate.stderr_;
      break;
    }
    case Quantity::volume_fraction:
      if (method == RunMethod::closed_form) {
        out.value = 1.0 - los_prob_single_multilane(params.lanes);
      } else if (method == RunMethod::simulate) {
        const SimEstimate e = sim_volume_fraction(sim_config());
        out.value = e.value;
        out.stderr_ = e.stderr_;
      } else {
        throw method_mismatch(spec.quantity, method);
      }
      break;
    case Quantity::ergodic:
      if (method == RunMethod::closed_form) {
        out.value = los_prob_single_multilane(params.lanes);
      } else if (method == RunMethod::simulate) {
        SimConfig cfg = sim_config();
        cfg.mode = SimMode::ergodic;
        const SimEstimate e = sim_ergodic_los(cfg, spec.tx_x);
        out.value = e.value;
        out.stderr_ = e.stderr_;
      } else {
        throw method_mismatch(spec.quantity, method);
      }
      break;
  }
  return out;
}

inline nlohmann::json scenario_to_json(const ScenarioParams& p) {
  nlohmann::json lanes = nlohmann::json::array();
  for (const Lane& ln : p.lanes)
    lanes.push_back({{"lambda_b_per_m", ln.lambda_b},
                     {"mu_per_m", ln.mu},
                     {"height_m", ln.height}});
  return {
      {"lambda_t_per_m", p.lambda_t},
      {"lambda_v_per_m", p.lambda_v},
      {"lanes", lanes},
      {"d1_m", p.d1},
      {"d2_m", p.d2},
      {"radio",
       {{"p", p.radio.p},
        {"sigma", p.radio.sigma},
        {"alpha_los", p.radio.alpha_los},
        {"tau", p.radio.tau},
        {"d_star_m", detect_radius(p.radio)}}},
      {"v_mps", p.v},
      {"vo_mps", p.v_o},
      {"allow_small_geometry", p.allow_small_geometry},
  };
}

// The implemented formula conventions, recorded so emitted numbers are
// auditable without rerunning anything.
inline nlohmann::json conventions_json() {
  return {
      {"joint_los_exponent",
       "-2*lambda_b*n/mu + sum_{k=2..n} (2/mu + gap_k)*lambda_b*exp(-mu*gap_k)"},
      {"coverage_single_term_exponent", "-lambda_t*xi - 2*lambda_b/mu"},
      {"subset_joint_exponent_prefix",
       "-2*lambda_b*j/mu for a subset of j distinct transmitters"},
      {"detectability", "strict inequality: p*d^-alpha/sigma > tau"},
  };
}

}  // namespace detail

/// Runs the sweep and, when out_csv is set, writes the CSV (one row per grid
/// point, value plus stderr column per stochastic method) and a JSON sidecar
/// with the fully resolved configuration.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  // Grid points are dispatched across the workers; each cell is evaluated
  // with a self-contained RNG derivation, so rows land in grid order with
  // the same bytes as a sequential run. A single-point grid instead spends
  // the workers inside the evaluators.
  const bool grid_parallel = spec.grid.size() > 1 && spec.workers > 1;
  ExperimentSpec cell_spec = spec;
  if (grid_parallel) cell_spec.workers = 1;
  std::vector<ExperimentRow> rows(spec.grid.size());
  std::exception_ptr error;
  std::mutex error_mu;
  run_partitioned(
      static_cast<std::int64_t>(spec.grid.size()),
      grid_parallel ? spec.workers : 1,
      [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
          try {
            const double value = spec.grid[static_cast<std::size_t>(i)];
            const ScenarioParams params = detail::apply_sweep(cell_spec, value);
            ExperimentRow row;
            row.sweep_value = value;
            for (RunMethod m : cell_spec.methods)
              row.by_method.push_back(
                  detail::evaluate_cell(cell_spec, params, value, m));
            rows[static_cast<std::size_t>(i)] = std::move(row);
          } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
        return 0;
      });
  if (error) std::rethrow_exception(error);

  if (!spec.out_csv.empty()) {
    namespace fs = std::filesystem;
    const fs::path csv_path(spec.out_csv);
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw ConfigError("out", "cannot open " + spec.out_csv);
    csv << sweep_column(spec.sweep);
    for (RunMethod m : spec.methods) {
      std::string name = to_string(m);
      for (char& c : name)
        if (c == '-') c = '_';
      csv << "," << name;
      if (method_is_stochastic(m)) csv << "," << name << "_stderr";
    }
    csv << "\n";
    for (const ExperimentRow& row : rows) {
      csv << detail::format_double(row.sweep_value);
      for (std::size_t i = 0; i < spec.methods.size(); ++i) {
        csv << "," << detail::format_double(row.by_method[i].value);
        if (method_is_stochastic(spec.methods[i]))
          csv << ","
              << detail::format_double(row.by_method[i].stderr_.value_or(0.0));
      }
      csv << "\n";
    }
    csv.close();

    nlohmann::json side;
    side["quantity"] = to_string(spec.quantity);
    side["sweep_var"] = to_string(spec.sweep);
    side["grid"] = spec.grid;
    nlohmann::json methods = nlohmann::json::array();
    for (RunMethod m : spec.methods) methods.push_back(to_string(m));
    side["methods"] = methods;
    side["seed"] = spec.seed;
    side["workers"] = spec.workers;
    side["trials"] = spec.trials;
    side["budget"] = {{"mc_trials", spec.budget.mc_trials},
                      {"quad_nodes", spec.budget.quad_nodes},
                      {"simplex_samples_per_n", spec.budget.simplex_samples_per_n}};
    side["eps_tail"] = spec.eps_tail;
    side["include_empty"] = spec.include_empty;
    if (spec.quantity == Quantity::coverage_k) side["k"] = spec.k;
    if (spec.quantity == Quantity::los_single || spec.quantity == Quantity::ergodic)
      side["tx_x"] = spec.tx_x;
    if (spec.quantity == Quantity::los_pair) side["pair_x1"] = spec.pair_x1;
    if (!spec.tx_positions.empty()) side["tx_positions"] = spec.tx_positions;
    side["scenario"] = detail::scenario_to_json(spec.base);
    side["analytic_conventions"] = detail::conventions_json();
    side["csv"] = csv_path.filename().string();
    std::ofstream js(spec.out_csv + ".json", std::ios::binary | std::ios::trunc);
    if (!js) throw ConfigError("out", "cannot open " + spec.out_csv + ".json");
    js << side.dump(2) << "\n";
  }
  return rows;
}

}  // namespace losline
