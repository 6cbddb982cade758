#pragma once

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "losline/errors.hpp"
#include "losline/params.hpp"

namespace losline {

// Scenario files are flat `key = value` text. Intensities are given per km
// of road and converted to per-meter here; obstacle lengths are given as the
// mean half-length in meters (so mu = 1 / mean_half_length_m). Lists
// (multi-lane scenarios) are comma-separated. '#' starts a comment.
//
// Keys: lambda_t_per_km, lambda_b_per_km, lambda_v_per_km,
//   mean_half_length_m, lane_heights_m, d1_m, d2_m,
//   p, sigma, alpha_los, tau, d_star_m (overrides the radio triple),
//   v_mps, vo_mps, allow_small_geometry.

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<double> parse_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError(key, "cannot parse number '" + item + "'");
    }
    if (pos != item.size())
      throw ConfigError(key, "trailing junk in number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(key, "empty value");
  return out;
}

inline double parse_scalar(const std::string& key, const std::string& value) {
  const std::vector<double> v = parse_list(key, value);
  if (v.size() != 1) throw ConfigError(key, "expected a single number");
  return v[0];
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key, "expected true/false");
}

}  // namespace detail

inline ScenarioParams parse_scenario_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) +
                                ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(key, "line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key)) throw ConfigError(key, "duplicate key");
    kv[key] = value;
  }

  static const char* known[] = {
      "lambda_t_per_km", "lambda_b_per_km", "lambda_v_per_km",
      "mean_half_length_m", "lane_heights_m", "d1_m", "d2_m",
      "p", "sigma", "alpha_los", "tau", "d_star_m",
      "v_mps", "vo_mps", "allow_small_geometry"};
  for (const auto& [key, _] : kv) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(key, "unknown key");
  }

  auto has = [&](const std::string& k) { return kv.count(k) > 0; };
  auto require = [&](const std::string& k) -> const std::string& {
    if (!has(k)) throw ConfigError(k, "missing required key");
    return kv[k];
  };

  ScenarioParams p;
  if (has("allow_small_geometry"))
    p.allow_small_geometry =
        detail::parse_bool("allow_small_geometry", kv["allow_small_geometry"]);
  p.d1 = detail::parse_scalar("d1_m", require("d1_m"));
  p.d2 = detail::parse_scalar("d2_m", require("d2_m"));
  if (has("lambda_t_per_km"))
    p.lambda_t = detail::parse_scalar("lambda_t_per_km", kv["lambda_t_per_km"]) / 1000.0;
  if (has("lambda_v_per_km"))
    p.lambda_v = detail::parse_scalar("lambda_v_per_km", kv["lambda_v_per_km"]) / 1000.0;

  std::vector<double> lb =
      detail::parse_list("lambda_b_per_km", require("lambda_b_per_km"));
  std::vector<double> half =
      detail::parse_list("mean_half_length_m", require("mean_half_length_m"));
  const std::size_t n_lanes = std::max(lb.size(), half.size());
  // A scalar broadcasts against a list; two lists must have equal length.
  if (lb.size() == 1) lb.assign(n_lanes, lb[0]);
  if (half.size() == 1) half.assign(n_lanes, half[0]);
  if (lb.size() != half.size())
    throw ConfigError("mean_half_length_m",
                      "list length does not match lambda_b_per_km");
  std::vector<double> heights;
  if (has("lane_heights_m")) {
    heights = detail::parse_list("lane_heights_m", kv["lane_heights_m"]);
    if (heights.size() == 1) heights.assign(n_lanes, heights[0]);
    if (heights.size() != n_lanes)
      throw ConfigError("lane_heights_m",
                        "list length does not match lambda_b_per_km");
  } else {
    if (n_lanes > 1)
      throw ConfigError("lane_heights_m",
                        "required for multi-lane scenarios (default is d1 "
                        "for a single lane)");
    heights.assign(1, p.d1);
  }
  for (std::size_t i = 0; i < n_lanes; ++i) {
    if (!(half[i] > 0.0))
      throw ConfigError("mean_half_length_m", "mean half-length must be > 0");
    p.lanes.push_back(Lane{lb[i] / 1000.0, 1.0 / half[i], heights[i]});
  }

  if (has("d_star_m")) {
    p.radio = radio_from_d_star(detail::parse_scalar("d_star_m", kv["d_star_m"]));
  } else {
    if (has("p")) p.radio.p = detail::parse_scalar("p", kv["p"]);
    if (has("sigma")) p.radio.sigma = detail::parse_scalar("sigma", kv["sigma"]);
    if (has("alpha_los"))
      p.radio.alpha_los = detail::parse_scalar("alpha_los", kv["alpha_los"]);
    if (has("tau")) p.radio.tau = detail::parse_scalar("tau", kv["tau"]);
  }
  if (has("v_mps")) p.v = detail::parse_scalar("v_mps", kv["v_mps"]);
  if (has("vo_mps")) p.v_o = detail::parse_scalar("vo_mps", kv["vo_mps"]);

  p.validate();
  return p;
}

/// Resolve a scenario name: an existing path wins; otherwise the file is
/// looked up in $LOSLINE_SCENARIO_DIR.
inline std::string resolve_scenario_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  if (const char* dir = std::getenv("LOSLINE_SCENARIO_DIR")) {
    const fs::path candidate = fs::path(dir) / name;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw ConfigError("scenario", "scenario file not found: " + name);
}

inline ScenarioParams load_scenario(const std::string& name) {
  const std::string path = resolve_scenario_path(name);
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace losline
