#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "steaneft/reporting.hpp"

namespace steaneft {

// Settings a config file can carry; zero/negative sentinels mean "not set"
// so flag overrides and subcommand defaults can fill them in.
struct CliConfig {
  std::vector<ErrorRates> grid;
  std::vector<ProtocolKind> protocols;
  std::vector<ClassFilter> filters;
  uint64_t trials = 0;
  uint64_t target_failures = 0;
  bool has_seed = false;
  uint64_t seed = 0;
  int jobs = 0;
  int rerun_cap = -1;
  ProtocolOptions options;
};

namespace detail {

// An axis is a number, an explicit list, or {"from", "to", "points"} with
// optional "log" (default true). Ranges expand to sorted point lists.
inline std::vector<double> parse_axis(const nlohmann::json& v, const std::string& name) {
  std::vector<double> pts;
  if (v.is_number()) {
    pts.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(name + ": list entries must be numbers");
      pts.push_back(e.get<double>());
    }
    if (pts.empty()) throw ConfigError(name + ": empty list");
  } else if (v.is_object()) {
    for (const auto& [k, _] : v.items())
      if (k != "from" && k != "to" && k != "points" && k != "log")
        throw ConfigError(name + ": unknown range key '" + k + "'");
    if (!v.contains("from") || !v.contains("to") || !v.contains("points"))
      throw ConfigError(name + ": range needs from, to, points");
    double from = v["from"].get<double>(), to = v["to"].get<double>();
    int points = v["points"].get<int>();
    bool log = v.value("log", true);
    if (points < 1) throw ConfigError(name + ": points must be >= 1");
    if (log && (from <= 0 || to <= 0))
      throw ConfigError(name + ": log range endpoints must be positive");
    if (points == 1) {
      pts.push_back(from);
    } else {
      for (int i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / (points - 1);
        pts.push_back(log ? std::exp(std::log(from) + t * (std::log(to) - std::log(from)))
                          : from + t * (to - from));
      }
    }
    std::sort(pts.begin(), pts.end());
  } else {
    throw ConfigError(name + ": expected number, list, or range object");
  }
  for (double p : pts)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(name + ": rate outside [0, 1]");
  return pts;
}

}  // namespace detail

inline CliConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  static const char* known[] = {"p",       "p_prep",  "p_meas",          "p_wait",
                                "p_cnot",  "protocols", "filters",       "trials",
                                "target_failures", "seed", "jobs",       "rerun_cap",
                                "data_hold_steps", "series_wait_steps",
                                "parallel_wait_steps", "retry_cap", "parallel_two_swap"};
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ConfigError("unknown config key '" + k + "'");
  }
  CliConfig cfg;
  bool has_p = j.contains("p");
  bool has_per_rate =
      j.contains("p_prep") || j.contains("p_meas") || j.contains("p_wait") || j.contains("p_cnot");
  if (has_p && has_per_rate)
    throw ConfigError("give either a diagonal 'p' axis or per-rate axes, not both");
  if (has_p) {
    for (double p : detail::parse_axis(j["p"], "p")) cfg.grid.push_back(ErrorRates::uniform(p));
  } else if (has_per_rate) {
    auto axis = [&](const char* name) {
      return j.contains(name) ? detail::parse_axis(j[name], name) : std::vector<double>{1e-5};
    };
    for (double pp : axis("p_prep"))
      for (double pm : axis("p_meas"))
        for (double pw : axis("p_wait"))
          for (double pc : axis("p_cnot")) cfg.grid.push_back(ErrorRates{pp, pm, pw, pc});
  }
  if (j.contains("protocols")) {
    if (!j["protocols"].is_array()) throw ConfigError("protocols must be a list of names");
    for (const auto& e : j["protocols"]) cfg.protocols.push_back(parse_protocol(e.get<std::string>()));
    if (cfg.protocols.empty()) throw ConfigError("protocols list is empty");
  }
  if (j.contains("filters")) {
    if (!j["filters"].is_array()) throw ConfigError("filters must be a list of names");
    for (const auto& e : j["filters"]) cfg.filters.push_back(parse_filter(e.get<std::string>()));
    if (cfg.filters.empty()) throw ConfigError("filters list is empty");
  }
  auto get_count = [&](const char* name) -> uint64_t {
    if (!j[name].is_number_integer() && !j[name].is_number_unsigned())
      throw ConfigError(std::string(name) + " must be a nonnegative integer");
    auto v = j[name].get<int64_t>();
    if (v < 0) throw ConfigError(std::string(name) + " must be >= 0");
    return static_cast<uint64_t>(v);
  };
  if (j.contains("trials")) cfg.trials = get_count("trials");
  if (j.contains("target_failures")) cfg.target_failures = get_count("target_failures");
  if (j.contains("seed")) {
    cfg.seed = get_count("seed");
    cfg.has_seed = true;
  }
  if (j.contains("jobs")) {
    cfg.jobs = static_cast<int>(get_count("jobs"));
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  }
  if (j.contains("rerun_cap")) cfg.rerun_cap = static_cast<int>(get_count("rerun_cap"));
  if (j.contains("data_hold_steps"))
    cfg.options.data_hold_steps = static_cast<int>(get_count("data_hold_steps"));
  if (j.contains("series_wait_steps"))
    cfg.options.series_wait_steps = static_cast<int>(get_count("series_wait_steps"));
  if (j.contains("parallel_wait_steps"))
    cfg.options.parallel_wait_steps = static_cast<int>(get_count("parallel_wait_steps"));
  if (j.contains("retry_cap")) {
    cfg.options.retry_cap = static_cast<int>(get_count("retry_cap"));
    if (cfg.options.retry_cap < 1) throw ConfigError("retry_cap must be >= 1");
  }
  if (j.contains("parallel_two_swap")) {
    if (!j["parallel_two_swap"].is_boolean())
      throw ConfigError("parallel_two_swap must be a boolean");
    cfg.options.parallel_two_swap = j["parallel_two_swap"].get<bool>();
  }
  return cfg;
}

}  // namespace steaneft
