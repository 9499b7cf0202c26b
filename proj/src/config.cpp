#include "cascade/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

namespace cascade {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto rate = [](double SystemParams::*field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) {
      const double x = parse_double(k, v);
      if (x < 0) throw ConfigError("key '" + k + "': rate must be >= 0");
      c.params.*field = x;
    };
  };
  static const std::map<std::string, Setter> m = {
      {"g_s", rate(&SystemParams::g_s)},
      {"g_t", rate(&SystemParams::g_t)},
      {"gamma_s", rate(&SystemParams::gamma_s)},
      {"gamma_t", rate(&SystemParams::gamma_t)},
      {"kappa_s", rate(&SystemParams::kappa_s)},
      {"kappa_t", rate(&SystemParams::kappa_t)},
      {"pump_s", rate(&SystemParams::pump_source)},
      {"pump_t", rate(&SystemParams::pump_target)},
      {"cascade_scale", rate(&SystemParams::cascade_scale)},
      {"detuning",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.params.detuning = parse_double(k, v);
       }},
      {"n_emitters_target",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n != 1 && n != 2) {
           throw ConfigError("key '" + k + "': must be 1 or 2");
         }
         c.params.n_emitters_target = n;
       }},
      {"cutoff_s",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 1) throw ConfigError("key '" + k + "': cutoff must be >= 1");
         c.params.cutoff_s = n;
       }},
      {"cutoff_t",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 1) throw ConfigError("key '" + k + "': cutoff must be >= 1");
         c.params.cutoff_t = n;
       }},
      {"scenario",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v != "cascaded" && v != "coherent" && v != "incoherent") {
           throw ConfigError("key '" + k +
                             "': expected cascaded|coherent|incoherent");
         }
         c.scenario = v;
       }},
      {"sweep_min",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double x = parse_double(k, v);
         if (x <= 0) throw ConfigError("key '" + k + "': must be > 0");
         c.sweep_min = x;
       }},
      {"sweep_max",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double x = parse_double(k, v);
         if (x <= 0) throw ConfigError("key '" + k + "': must be > 0");
         c.sweep_max = x;
       }},
      {"sweep_points",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 1) throw ConfigError("key '" + k + "': must be >= 1");
         c.sweep_points = n;
       }},
      {"dt",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double x = parse_double(k, v);
         if (x <= 0) throw ConfigError("key '" + k + "': must be > 0");
         c.dt = x;
       }},
      {"residual_tol",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double x = parse_double(k, v);
         if (x <= 0) throw ConfigError("key '" + k + "': must be > 0");
         c.residual_tol = x;
       }},
      {"max_time",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double x = parse_double(k, v);
         if (x <= 0) throw ConfigError("key '" + k + "': must be > 0");
         c.max_time = x;
       }},
      {"n_max",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 2) throw ConfigError("key '" + k + "': must be >= 2");
         c.n_max = n;
       }},
      {"cutoff_start",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 1) throw ConfigError("key '" + k + "': must be >= 1");
         c.cutoff_start = n;
       }},
      {"cutoff_step",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 1) throw ConfigError("key '" + k + "': must be >= 1");
         c.cutoff_step = n;
       }},
      {"cutoff_cap",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 1) throw ConfigError("key '" + k + "': must be >= 1");
         c.cutoff_cap = n;
       }},
      {"output_dir",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.output_dir = v;
       }},
      {"workers",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 0) throw ConfigError("key '" + k + "': must be >= 0");
         c.workers = n;
       }},
      {"linear_solver",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.linear_solver = parse_bool(k, v);
       }},
      {"warmup_time",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double x = parse_double(k, v);
         if (x < 0) throw ConfigError("key '" + k + "': must be >= 0");
         c.warmup_time = x;
       }},
  };
  return m;
}

void apply_pair(RunConfig& config, const std::string& key,
                const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw ConfigError("unknown key '" + key + "'");
  }
  it->second(config, key, value);
}

void finalize(const RunConfig& c) {
  if (c.sweep_max <= c.sweep_min) {
    throw ConfigError("sweep_max must be greater than sweep_min");
  }
  if (c.cutoff_cap < c.cutoff_start) {
    throw ConfigError("cutoff_cap must be >= cutoff_start");
  }
  c.params.validate();
}

}  // namespace

ScenarioKind RunConfig::scenario_kind() const {
  if (scenario == "cascaded") return ScenarioKind::Cascaded;
  if (scenario == "coherent") return ScenarioKind::CoherentDrive;
  return ScenarioKind::IncoherentDrive;
}

EscalationPlan RunConfig::escalation() const {
  return {cutoff_start, cutoff_step, cutoff_cap};
}

SteadyStateOptions RunConfig::steady_options(int threads) const {
  SteadyStateOptions o;
  o.evolve = {dt, residual_tol, max_time};
  o.use_linear_solver = linear_solver;
  o.warmup_time = warmup_time;
  o.threads = threads;
  return o;
}

std::vector<double> RunConfig::pump_grid() const {
  if (sweep_points == 1) return {sweep_min};
  return log_grid(sweep_min, sweep_max, sweep_points);
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_pair(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  finalize(config);
  return config;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  apply_pair(config, trim(assignment.substr(0, eq)),
             trim(assignment.substr(eq + 1)));
  finalize(config);
}

std::string config_metadata(const RunConfig& c) {
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "g_s = " << num(c.params.g_s) << "\n";
  out << "g_t = " << num(c.params.g_t) << "\n";
  out << "gamma_s = " << num(c.params.gamma_s) << "\n";
  out << "gamma_t = " << num(c.params.gamma_t) << "\n";
  out << "kappa_s = " << num(c.params.kappa_s) << "\n";
  out << "kappa_t = " << num(c.params.kappa_t) << "\n";
  out << "pump_s = " << num(c.params.pump_source) << "\n";
  out << "pump_t = " << num(c.params.pump_target) << "\n";
  out << "cascade_scale = " << num(c.params.cascade_scale) << "\n";
  out << "detuning = " << num(c.params.detuning) << "\n";
  out << "n_emitters_target = " << c.params.n_emitters_target << "\n";
  out << "cutoff_s = " << c.params.cutoff_s << "\n";
  out << "cutoff_t = " << c.params.cutoff_t << "\n";
  out << "scenario = " << c.scenario << "\n";
  out << "sweep_min = " << num(c.sweep_min) << "\n";
  out << "sweep_max = " << num(c.sweep_max) << "\n";
  out << "sweep_points = " << c.sweep_points << "\n";
  out << "dt = " << num(c.dt) << "\n";
  out << "residual_tol = " << num(c.residual_tol) << "\n";
  out << "max_time = " << num(c.max_time) << "\n";
  out << "n_max = " << c.n_max << "\n";
  out << "cutoff_start = " << c.cutoff_start << "\n";
  out << "cutoff_step = " << c.cutoff_step << "\n";
  out << "cutoff_cap = " << c.cutoff_cap << "\n";
  out << "output_dir = " << c.output_dir << "\n";
  out << "workers = " << c.workers << "\n";
  out << "linear_solver = " << (c.linear_solver ? "true" : "false") << "\n";
  out << "warmup_time = " << num(c.warmup_time) << "\n";
  return out.str();
}

}  // namespace cascade
