#pragma once

#include "cascade/scenarios.hpp"

#include <stdexcept>
#include <string>

namespace cascade {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full run configuration: flat key = value pairs, '#' comments, unknown
/// keys rejected. Omitted keys take the defaults below.
struct RunConfig {
  SystemParams params;
  std::string scenario = "cascaded";  // cascaded | coherent | incoherent
  double sweep_min = 1e-3;            // ps^-1
  double sweep_max = 10.0;
  int sweep_points = 30;
  double dt = 0.01;
  double residual_tol = 1e-10;
  double max_time = 1e4;
  int n_max = 10;
  int cutoff_start = 6;
  int cutoff_step = 2;
  int cutoff_cap = 14;
  std::string output_dir = ".";
  int workers = 0;  // 0 = hardware concurrency
  bool linear_solver = true;
  double warmup_time = 0.0;

  ScenarioKind scenario_kind() const;
  EscalationPlan escalation() const;
  SteadyStateOptions steady_options(int threads = 1) const;
  std::vector<double> pump_grid() const;
};

RunConfig parse_config(const std::string& text);

/// Apply one "key=value" override (the CLI --set flag).
void apply_override(RunConfig& config, const std::string& assignment);

/// Every key echoed with full precision; parse_config round-trips it.
std::string config_metadata(const RunConfig& config);

}  // namespace cascade
